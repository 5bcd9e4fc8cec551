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

#include "rfib/logistic.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "rfib/error.hpp"

namespace rfib {
namespace {

// log(1 + exp(t))
double log1pexp(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

using MatX = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

std::vector<double> LinearClassifier::predict_proba(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    double t = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) t += weights[j] * row[j];
    out[i] = sigmoid(t);
  }
  return out;
}

std::vector<int> LinearClassifier::predict(const Matrix& x) const {
  const auto p = predict_proba(x);
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] > 0.5 ? 1 : 0;
  return out;
}

LinearClassifier fit_logistic(const Matrix& x, std::span<const int> y,
                              const LogisticOptions& options) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n < 2) throw EmptyDataset("logistic regression needs >= 2 rows");
  if (y.size() != n) throw LengthMismatch("y length differs from row count");
  std::size_t positives = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw ConfigError("labels must be binary");
    positives += static_cast<std::size_t>(v);
  }
  if (positives == 0 || positives == n) {
    throw SingleClassTraining("logistic regression needs both classes");
  }

  // Design matrix with a trailing column of ones for the bias.
  MatX a(n, d + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) a(i, j) = x(i, j);
    a(i, d) = 1.0;
  }
  Eigen::VectorXd target(n);
  for (std::size_t i = 0; i < n; ++i) target(i) = y[i];
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, options.l2);
  penalty(d) = 0.0;

  auto objective = [&](const Eigen::VectorXd& theta) {
    const Eigen::VectorXd eta = a * theta;
    double f = 0.5 * (penalty.array() * theta.array().square()).sum();
    for (std::size_t i = 0; i < n; ++i) f += log1pexp(eta(i)) - target(i) * eta(i);
    return f;
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  double f = objective(theta);
  LinearClassifier clf;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd eta = a * theta;
    Eigen::VectorXd p(n);
    Eigen::VectorXd w(n);
    for (std::size_t i = 0; i < n; ++i) {
      p(i) = sigmoid(eta(i));
      w(i) = p(i) * (1.0 - p(i));
    }
    const Eigen::VectorXd grad =
        a.transpose() * (p - target) + penalty.cwiseProduct(theta);
    clf.grad_norm = grad.norm();
    clf.iterations = it;
    if (clf.grad_norm < options.tolerance) break;

    Eigen::MatrixXd hessian = a.transpose() * w.asDiagonal() * a;
    hessian.diagonal() += penalty;
    // Keeps the bias direction invertible when every weight w_i underflows.
    hessian.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hessian.ldlt().solve(grad);

    double t = 1.0;
    const double slope = grad.dot(step);
    Eigen::VectorXd next = theta - step;
    double f_next = objective(next);
    while (f_next > f - 1e-4 * t * slope && t > 1e-10) {
      t *= 0.5;
      next = theta - t * step;
      f_next = objective(next);
    }
    if (!(f_next <= f)) break;  // no further descent possible
    theta = next;
    f = f_next;
    clf.iterations = it + 1;
  }

  clf.weights.assign(theta.data(), theta.data() + d);
  clf.bias = theta(d);
  return clf;
}

}  // namespace rfib
