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

// Batch objective
//
//   J = 1/N sum_i [ D_alpha(P(Z|x_i) || N(0, gamma2 I))
//                   - beta1 log Q(y_i | z_i) - beta2 log Q(y_i | s_i, z_i) ]
//
// with the entropy constants H(Y), H(Y|S) left out. The log-likelihood terms
// are averaged over the Monte Carlo draws stored in the encoded batch; the
// divergence is evaluated once per example.

#ifndef RFIB_LOSS_HPP_
#define RFIB_LOSS_HPP_

#include <span>

#include "rfib/config.hpp"
#include "rfib/model.hpp"

namespace rfib {

inline constexpr double kProbClamp = 1e-7;

// total == compression - beta1 * utility_loglik - beta2 * conditional_loglik
// holds exactly: total is computed from the stored fields.
struct LossBreakdown {
  double total = 0.0;
  double compression = 0.0;
  double utility_loglik = 0.0;
  double conditional_loglik = 0.0;
};

// Bernoulli log-likelihood with the probability clamped to
// [kProbClamp, 1 - kProbClamp].
double bernoulli_loglik(int y, double p);

// y and s have one entry per example; py_z and py_sz have one entry per row
// of enc.z (examples x mc_samples).
LossBreakdown rfib_loss(const EncodedBatch& enc, std::span<const int> y,
                        std::span<const int> s, std::span<const double> py_z,
                        std::span<const double> py_sz, const RfibConfig& cfg);

// rfib_loss with alpha = 1 and beta2 = 0.
LossBreakdown ib_loss(const EncodedBatch& enc, std::span<const int> y,
                      std::span<const int> s, std::span<const double> py_z,
                      std::span<const double> py_sz, const RfibConfig& cfg);

// rfib_loss with alpha = 1 and beta1 = 0.
LossBreakdown cfb_loss(const EncodedBatch& enc, std::span<const int> y,
                       std::span<const int> s, std::span<const double> py_z,
                       std::span<const double> py_sz, const RfibConfig& cfg);

}  // namespace rfib

#endif  // RFIB_LOSS_HPP_
