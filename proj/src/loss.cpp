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

#include "rfib/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rfib/error.hpp"
#include "rfib/kernels.hpp"

namespace rfib {

void RfibConfig::validate() const {
  if (!(beta1 >= 0.0) || !std::isfinite(beta1)) {
    throw ConfigError("beta1 must be finite and >= 0");
  }
  if (!(beta2 >= 0.0) || !std::isfinite(beta2)) {
    throw ConfigError("beta2 must be finite and >= 0");
  }
  if (!(gamma2 > 0.0) || !std::isfinite(gamma2)) {
    throw ConfigError("gamma2 must be finite and > 0");
  }
  if (d == 0) throw ConfigError("latent dimension d must be >= 1");
  if (mc_samples == 0) throw ConfigError("mc_samples must be >= 1");
}

std::string method_label(const RfibConfig& cfg) {
  if (cfg.alpha.is_kl() && cfg.beta2 == 0.0) return "IB";
  if (cfg.alpha.is_kl() && cfg.beta1 == 0.0) return "CFB";
  return "RFIB";
}

double bernoulli_loglik(int y, double p) {
  const double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return y == 1 ? std::log(pc) : std::log1p(-pc);
}

LossBreakdown rfib_loss(const EncodedBatch& enc, std::span<const int> y,
                        std::span<const int> s, std::span<const double> py_z,
                        std::span<const double> py_sz, const RfibConfig& cfg) {
  cfg.validate();
  const std::size_t n = enc.examples();
  if (n == 0) throw EmptyDataset("empty batch");
  const std::size_t rows = enc.z.rows();
  if (y.size() != n || s.size() != n) {
    throw LengthMismatch("y/s lengths must equal the batch size " +
                         std::to_string(n));
  }
  if (py_z.size() != rows || py_sz.size() != rows) {
    throw LengthMismatch("probability vectors must have " +
                         std::to_string(rows) + " entries");
  }

  std::vector<double> div;
  kernels::parallel::divergence_rows(enc.mu, enc.var, cfg.gamma2,
                                     cfg.alpha.value(), div, nullptr, nullptr);
  double div_sum = 0.0;
  for (double v : div) div_sum += v;

  double ll_f = 0.0;
  double ll_g = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const int label = y[r % n];
    ll_f += bernoulli_loglik(label, py_z[r]);
    ll_g += bernoulli_loglik(label, py_sz[r]);
  }

  LossBreakdown out;
  out.compression = div_sum / static_cast<double>(n);
  out.utility_loglik = ll_f / static_cast<double>(rows);
  out.conditional_loglik = ll_g / static_cast<double>(rows);
  out.total = out.compression - cfg.beta1 * out.utility_loglik -
              cfg.beta2 * out.conditional_loglik;
  return out;
}

LossBreakdown ib_loss(const EncodedBatch& enc, std::span<const int> y,
                      std::span<const int> s, std::span<const double> py_z,
                      std::span<const double> py_sz, const RfibConfig& cfg) {
  RfibConfig reduced = cfg;
  reduced.alpha = Alpha(1.0);
  reduced.beta2 = 0.0;
  return rfib_loss(enc, y, s, py_z, py_sz, reduced);
}

LossBreakdown cfb_loss(const EncodedBatch& enc, std::span<const int> y,
                       std::span<const int> s, std::span<const double> py_z,
                       std::span<const double> py_sz, const RfibConfig& cfg) {
  RfibConfig reduced = cfg;
  reduced.alpha = Alpha(1.0);
  reduced.beta1 = 0.0;
  return rfib_loss(enc, y, s, py_z, py_sz, reduced);
}

}  // namespace rfib
