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

// Closed-form Renyi and KL divergences between a diagonal Gaussian posterior
// N(mu, diag(var)) and a spherical prior N(0, gamma2 * I).
//
// Orders alpha = 0 and alpha = 1 are the extended orders: D_0 = 0 (shared
// support) and D_1 = KL. For alpha > 1 the closed form is only defined while
// alpha*gamma2 + (1-alpha)*var_i > 0 for every coordinate.

#ifndef RFIB_DIVERGENCES_HPP_
#define RFIB_DIVERGENCES_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rfib {

struct DiagGaussian {
  std::vector<double> mu;
  std::vector<double> var;

  std::size_t dim() const { return mu.size(); }
};

struct SphericalPrior {
  double gamma2 = 1.0;
  std::size_t d = 0;
};

// Renyi order; throws ConfigError for negative or non-finite values.
class Alpha {
 public:
  Alpha() = default;
  explicit Alpha(double value);
  double value() const { return value_; }
  bool is_kl() const { return value_ == 1.0; }
  bool is_zero() const { return value_ == 0.0; }

 private:
  double value_ = 1.0;
};

struct DivergenceGrad {
  std::vector<double> d_mu;
  std::vector<double> d_var;
};

double renyi_div(const DiagGaussian& p, const SphericalPrior& q, Alpha a);
double kl_div(const DiagGaussian& p, const SphericalPrior& q);
DivergenceGrad renyi_div_grad(const DiagGaussian& p, const SphericalPrior& q,
                              Alpha a);

// Largest admissible posterior variance: alpha*gamma2/(alpha-1) for alpha > 1,
// nullopt (unbounded) otherwise.
std::optional<double> max_valid_variance(Alpha a, const SphericalPrior& q);

// Numerical oracle: (1/(alpha-1)) ln of the integral of p^alpha q^(1-alpha),
// evaluated one coordinate at a time by composite Simpson quadrature with
// interval doubling starting from n_points intervals. Intended for d <= 4.
double renyi_div_oracle(const DiagGaussian& p, const SphericalPrior& q,
                        Alpha a, std::size_t n_points = 256);

namespace detail {

// Span-based row kernels used by the batch code paths. Inputs are assumed
// to have been dimension-checked; validity is still enforced. d_mu / d_var
// may be empty when only the value is needed.
double renyi_row(std::span<const double> mu, std::span<const double> var,
                 double gamma2, double alpha);
void renyi_row_grad(std::span<const double> mu, std::span<const double> var,
                    double gamma2, double alpha, std::span<double> d_mu,
                    std::span<double> d_var);

}  // namespace detail

}  // namespace rfib

#endif  // RFIB_DIVERGENCES_HPP_
