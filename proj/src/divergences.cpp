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

#include "rfib/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rfib/error.hpp"

namespace rfib {
namespace {

// Below this the alpha > 1 closed form is treated as invalid rather than
// returning a blown-up value.
constexpr double kBoundaryGuard = 1e-12;

void check_shapes(const DiagGaussian& p, const SphericalPrior& q) {
  if (p.mu.size() != p.var.size()) {
    throw DimensionMismatch("mu has length " + std::to_string(p.mu.size()) +
                            " but var has length " +
                            std::to_string(p.var.size()));
  }
  if (p.mu.empty()) throw DimensionMismatch("Gaussian dimension must be >= 1");
  if (q.d != 0 && q.d != p.mu.size()) {
    throw DimensionMismatch("prior dimension " + std::to_string(q.d) +
                            " does not match posterior dimension " +
                            std::to_string(p.mu.size()));
  }
  if (!(q.gamma2 > 0.0) || !std::isfinite(q.gamma2)) {
    throw ConfigError("prior variance gamma2 must be positive and finite");
  }
}

void check_variances(std::span<const double> var, double gamma2,
                     double alpha) {
  for (std::size_t i = 0; i < var.size(); ++i) {
    if (!(var[i] > 0.0) || !std::isfinite(var[i])) {
      throw NonPositiveVariance("variance at coordinate " + std::to_string(i) +
                                " is not a positive finite number");
    }
  }
  if (alpha > 1.0) {
    const double bound = alpha * gamma2 / (alpha - 1.0);
    for (std::size_t i = 0; i < var.size(); ++i) {
      const double mix = alpha * gamma2 + (1.0 - alpha) * var[i];
      if (var[i] >= bound || mix < kBoundaryGuard) {
        throw ValidityViolation(
            "variance " + std::to_string(var[i]) + " at coordinate " +
                std::to_string(i) + " violates var < alpha*gamma2/(alpha-1) = " +
                std::to_string(bound),
            bound);
      }
    }
  }
}

}  // namespace

Alpha::Alpha(double value) : value_(value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ConfigError("Renyi order alpha must be finite and >= 0, got " +
                      std::to_string(value));
  }
}

namespace detail {

double renyi_row(std::span<const double> mu, std::span<const double> var,
                 double gamma2, double alpha) {
  check_variances(var, gamma2, alpha);
  if (alpha == 0.0) return 0.0;
  double total = 0.0;
  if (alpha == 1.0) {
    const double log_g2 = std::log(gamma2);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      total += std::log(var[i]) - log_g2 + 1.0 - var[i] / gamma2 -
               mu[i] * mu[i] / gamma2;
    }
    return -0.5 * total;
  }
  const double log_g2 = std::log(gamma2);
  const double inv_am1 = 1.0 / (alpha - 1.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double mix = alpha * gamma2 + (1.0 - alpha) * var[i];
    const double quad = 0.5 * alpha * mu[i] * mu[i] / mix;
    const double log_ratio =
        std::log(mix) - (1.0 - alpha) * std::log(var[i]) - alpha * log_g2;
    total += quad - 0.5 * inv_am1 * log_ratio;
  }
  return total;
}

void renyi_row_grad(std::span<const double> mu, std::span<const double> var,
                    double gamma2, double alpha, std::span<double> d_mu,
                    std::span<double> d_var) {
  check_variances(var, gamma2, alpha);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (alpha == 0.0) {
      d_mu[i] = 0.0;
      d_var[i] = 0.0;
      continue;
    }
    const double mix = alpha * gamma2 + (1.0 - alpha) * var[i];
    d_mu[i] = alpha * mu[i] / mix;
    d_var[i] = -0.5 * alpha * (1.0 - alpha) * mu[i] * mu[i] / (mix * mix) +
               0.5 * (1.0 / mix - 1.0 / var[i]);
  }
}

}  // namespace detail

double renyi_div(const DiagGaussian& p, const SphericalPrior& q, Alpha a) {
  check_shapes(p, q);
  return detail::renyi_row(p.mu, p.var, q.gamma2, a.value());
}

double kl_div(const DiagGaussian& p, const SphericalPrior& q) {
  check_shapes(p, q);
  return detail::renyi_row(p.mu, p.var, q.gamma2, 1.0);
}

DivergenceGrad renyi_div_grad(const DiagGaussian& p, const SphericalPrior& q,
                              Alpha a) {
  check_shapes(p, q);
  DivergenceGrad g{std::vector<double>(p.dim()), std::vector<double>(p.dim())};
  detail::renyi_row_grad(p.mu, p.var, q.gamma2, a.value(), g.d_mu, g.d_var);
  return g;
}

std::optional<double> max_valid_variance(Alpha a, const SphericalPrior& q) {
  if (a.value() > 1.0) return a.value() * q.gamma2 / (a.value() - 1.0);
  return std::nullopt;
}

namespace {

double log_normal_pdf(double x, double mean, double var) {
  const double diff = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) -
         diff * diff / (2.0 * var);
}

double simpson(double lo, double hi, std::size_t n, double mu, double var,
               double gamma2, double alpha) {
  const double h = (hi - lo) / static_cast<double>(n);
  auto f = [&](double x) {
    return std::exp(alpha * log_normal_pdf(x, mu, var) +
                    (1.0 - alpha) * log_normal_pdf(x, 0.0, gamma2));
  };
  double sum = f(lo) + f(hi);
  for (std::size_t k = 1; k < n; ++k) {
    sum += (k % 2 == 1 ? 4.0 : 2.0) * f(lo + static_cast<double>(k) * h);
  }
  return sum * h / 3.0;
}

// Integral over the real line of N(x; mu, var)^alpha N(x; 0, gamma2)^(1-alpha).
double coordinate_integral(double mu, double var, double gamma2, double alpha,
                           std::size_t n_points) {
  // The integrand is itself an unnormalised Gaussian; cover it and both
  // densities by at least 12 standard deviations.
  const double precision = alpha / var + (1.0 - alpha) / gamma2;
  const double eff_sd = 1.0 / std::sqrt(precision);
  const double eff_mean = (alpha * mu / var) / precision;
  const double half_width =
      std::max({std::abs(mu) + 12.0 * std::sqrt(var), 12.0 * std::sqrt(gamma2),
                std::abs(eff_mean) + 12.0 * eff_sd});

  std::size_t n = std::max<std::size_t>(n_points + n_points % 2, 2);
  double prev = simpson(-half_width, half_width, n, mu, var, gamma2, alpha);
  constexpr std::size_t kMaxIntervals = std::size_t{1} << 22;
  double rel_change = 0.0;
  while (n < kMaxIntervals) {
    n *= 2;
    const double next =
        simpson(-half_width, half_width, n, mu, var, gamma2, alpha);
    rel_change = std::abs(next - prev) / std::abs(next);
    prev = next;
    if (rel_change < 1e-12) return next;
  }
  if (rel_change > 1e-9) {
    throw QuadratureNonConvergence(
        "Simpson refinements still differ by " + std::to_string(rel_change));
  }
  return prev;
}

}  // namespace

double renyi_div_oracle(const DiagGaussian& p, const SphericalPrior& q,
                        Alpha a, std::size_t n_points) {
  check_shapes(p, q);
  const double alpha = a.value();
  if (alpha == 0.0 || alpha == 1.0) {
    throw ConfigError("the quadrature oracle needs alpha > 0 and alpha != 1");
  }
  check_variances(p.var, q.gamma2, alpha);
  double log_integral = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    log_integral +=
        std::log(coordinate_integral(p.mu[i], p.var[i], q.gamma2, alpha,
                                     n_points));
  }
  return log_integral / (alpha - 1.0);
}

}  // namespace rfib
