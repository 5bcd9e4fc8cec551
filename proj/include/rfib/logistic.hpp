/*
 * Copyright 2026 The RFIB Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RFIB_LOGISTIC_HPP_
#define RFIB_LOGISTIC_HPP_

#include <span>
#include <vector>

#include "rfib/matrix.hpp"

namespace rfib {

// L2-regularised logistic regression with an unpenalised bias, minimising
//   0.5 * l2 * |w|^2 + sum_i logloss(y_i, w.x_i + b).
struct LinearClassifier {
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t iterations = 0;
  double grad_norm = 0.0;

  std::vector<double> predict_proba(const Matrix& x) const;
  // 1 where P(Y=1|x) > 0.5.
  std::vector<int> predict(const Matrix& x) const;
};

struct LogisticOptions {
  double l2 = 1.0;
  std::size_t max_iterations = 1000;
  double tolerance = 1e-6;  // on the gradient 2-norm
};

// Damped Newton iterations. Throws SingleClassTraining when y has one class
// and EmptyDataset when fewer than two rows are given.
LinearClassifier fit_logistic(const Matrix& x, std::span<const int> y,
                              const LogisticOptions& options = {});

}  // namespace rfib

#endif  // RFIB_LOGISTIC_HPP_
