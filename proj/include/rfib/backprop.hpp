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

// Reverse-mode gradient of the batch objective with respect to every model
// parameter: through both decoder heads, the reparameterised sample, the
// variance activation, and the closed-form divergence gradient.

#ifndef RFIB_BACKPROP_HPP_
#define RFIB_BACKPROP_HPP_

#include <span>
#include <vector>

#include "rfib/loss.hpp"
#include "rfib/model.hpp"

namespace rfib {

struct LossAndGrad {
  LossBreakdown loss;
  std::vector<double> grad;  // same layout as ModelParams::flat()
};

// Forward pass only. Draws mc_samples x N noise rows from `noise`.
LossBreakdown forward_loss(const ModelParams& params, const Matrix& x,
                           std::span<const int> y, std::span<const int> s,
                           const RfibConfig& cfg, NoiseSource& noise);

LossAndGrad backward(const ModelParams& params, const Matrix& x,
                     std::span<const int> y, std::span<const int> s,
                     const RfibConfig& cfg, NoiseSource& noise);

// Variants taking explicit (mc_samples * N) x d noise draws.
LossBreakdown forward_loss_with_noise(const ModelParams& params,
                                      const Matrix& x, std::span<const int> y,
                                      std::span<const int> s,
                                      const RfibConfig& cfg, Matrix noise);
LossAndGrad backward_with_noise(const ModelParams& params, const Matrix& x,
                                std::span<const int> y, std::span<const int> s,
                                const RfibConfig& cfg, Matrix noise);

}  // namespace rfib

#endif  // RFIB_BACKPROP_HPP_
