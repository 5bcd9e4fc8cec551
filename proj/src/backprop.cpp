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

#include "rfib/backprop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfib/error.hpp"
#include "rfib/kernels.hpp"

namespace rfib {
namespace {

void tanh_backward(Matrix& grad, const Matrix& activation) {
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double a = activation.data()[i];
    grad.data()[i] *= 1.0 - a * a;
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// d(-weight/rows * log b(y; p))/d logit, zero where the clamp is active.
std::vector<double> logit_grad(const std::vector<double>& prob,
                               std::span<const int> y, std::size_t n,
                               double weight) {
  const double scale = weight / static_cast<double>(prob.size());
  std::vector<double> g(prob.size(), 0.0);
  for (std::size_t r = 0; r < prob.size(); ++r) {
    const double p = prob[r];
    if (p < kProbClamp || p > 1.0 - kProbClamp) continue;
    g[r] = -scale * (static_cast<double>(y[r % n]) - p);
  }
  return g;
}

// Backpropagates through one head; returns dL/d(head input).
Matrix head_backward(const ModelParams& params, Layer first,
                     const HeadPass& pass, const std::vector<double>& dlogit,
                     std::span<double> grad) {
  const auto base = static_cast<std::size_t>(first);
  const Layer l1 = static_cast<Layer>(base);
  const Layer l2 = static_cast<Layer>(base + 1);
  const Layer out = static_cast<Layer>(base + 2);

  Matrix dy(dlogit.size(), 1);
  std::copy(dlogit.begin(), dlogit.end(), dy.data());

  Matrix dh2;
  kernels::parallel::dense_backward(pass.hidden2, params.layer(out), dy, &dh2,
                                    params.grad_view(out, grad));
  tanh_backward(dh2, pass.hidden2);
  Matrix dh1;
  kernels::parallel::dense_backward(pass.hidden1, params.layer(l2), dh2, &dh1,
                                    params.grad_view(l2, grad));
  tanh_backward(dh1, pass.hidden1);
  Matrix dinput;
  kernels::parallel::dense_backward(pass.input, params.layer(l1), dh1, &dinput,
                                    params.grad_view(l1, grad));
  return dinput;
}

void check_labels(const Matrix& x, std::span<const int> y,
                  std::span<const int> s) {
  if (x.rows() == 0) throw EmptyDataset("empty batch");
  if (y.size() != x.rows() || s.size() != x.rows()) {
    throw LengthMismatch("batch has " + std::to_string(x.rows()) +
                         " rows but y/s have " + std::to_string(y.size()) +
                         "/" + std::to_string(s.size()));
  }
}

Matrix draw(const Matrix& x, const RfibConfig& cfg, NoiseSource& noise) {
  Matrix draws(std::max<std::size_t>(cfg.mc_samples, 1) * x.rows(), cfg.d);
  noise.fill(draws);
  return draws;
}

}  // namespace

LossBreakdown forward_loss(const ModelParams& params, const Matrix& x,
                           std::span<const int> y, std::span<const int> s,
                           const RfibConfig& cfg, NoiseSource& noise) {
  return forward_loss_with_noise(params, x, y, s, cfg, draw(x, cfg, noise));
}

LossAndGrad backward(const ModelParams& params, const Matrix& x,
                     std::span<const int> y, std::span<const int> s,
                     const RfibConfig& cfg, NoiseSource& noise) {
  return backward_with_noise(params, x, y, s, cfg, draw(x, cfg, noise));
}

LossBreakdown forward_loss_with_noise(const ModelParams& params,
                                      const Matrix& x, std::span<const int> y,
                                      std::span<const int> s,
                                      const RfibConfig& cfg, Matrix noise) {
  cfg.validate();
  check_labels(x, y, s);
  const EncodedBatch enc = encode_with_noise(params, x, cfg, std::move(noise));
  const std::vector<int> s_rows = detail::tile(s, enc.samples());
  const HeadPass f = detail::head_f_forward(params, enc.z);
  const HeadPass g = detail::head_g_forward(params, enc.z, s_rows);
  return rfib_loss(enc, y, s, f.prob, g.prob, cfg);
}

LossAndGrad backward_with_noise(const ModelParams& params, const Matrix& x,
                                std::span<const int> y, std::span<const int> s,
                                const RfibConfig& cfg, Matrix noise) {
  cfg.validate();
  check_labels(x, y, s);
  const EncodedBatch enc = encode_with_noise(params, x, cfg, std::move(noise));
  const std::size_t n = enc.examples();
  const std::size_t m = enc.samples();
  const std::size_t d = params.arch().latent_dim;
  const std::vector<int> s_rows = detail::tile(s, m);
  const HeadPass f = detail::head_f_forward(params, enc.z);
  const HeadPass g = detail::head_g_forward(params, enc.z, s_rows);

  LossAndGrad out;
  out.loss = rfib_loss(enc, y, s, f.prob, g.prob, cfg);
  out.grad.assign(params.size(), 0.0);
  std::span<double> grad(out.grad);

  const Matrix dz_f = head_backward(params, Layer::kHeadFHidden1, f,
                                    logit_grad(f.prob, y, n, cfg.beta1), grad);
  const Matrix dz_g = head_backward(params, Layer::kHeadGHidden1, g,
                                    logit_grad(g.prob, y, n, cfg.beta2), grad);

  std::vector<double> div;
  Matrix ddiv_mu;
  Matrix ddiv_var;
  kernels::parallel::divergence_rows(enc.mu, enc.var, cfg.gamma2,
                                     cfg.alpha.value(), div, &ddiv_mu,
                                     &ddiv_var);

  const double inv_n = 1.0 / static_cast<double>(n);
  const bool bounded = cfg.alpha.value() > 1.0;
  Matrix dmu(n, d);
  Matrix dpre(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double dz_sum = 0.0;
      double dsigma = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t r = k * n + i;
        // Head g sees [z, s]; its last input column is s and has no upstream.
        const double dz = dz_f(r, j) + dz_g(r, j);
        dz_sum += dz;
        dsigma += dz * enc.noise(r, j);
      }
      dmu(i, j) = inv_n * ddiv_mu(i, j) + dz_sum;
      const double var = enc.var(i, j);
      const double dvar = inv_n * ddiv_var(i, j) + dsigma / (2.0 * enc.sigma(i, j));
      const double dact = bounded ? var * (1.0 - var) : sigmoid(enc.sigma_pre(i, j));
      dpre(i, j) = dvar * dact;
    }
  }

  Matrix dh2_mu;
  kernels::parallel::dense_backward(enc.hidden2,
                                    params.layer(Layer::kEncoderMu), dmu,
                                    &dh2_mu,
                                    params.grad_view(Layer::kEncoderMu, grad));
  Matrix dh2;
  kernels::parallel::dense_backward(
      enc.hidden2, params.layer(Layer::kEncoderSigma), dpre, &dh2,
      params.grad_view(Layer::kEncoderSigma, grad));
  for (std::size_t i = 0; i < dh2.size(); ++i) dh2.data()[i] += dh2_mu.data()[i];
  tanh_backward(dh2, enc.hidden2);
  Matrix dh1;
  kernels::parallel::dense_backward(
      enc.hidden1, params.layer(Layer::kEncoderHidden2), dh2, &dh1,
      params.grad_view(Layer::kEncoderHidden2, grad));
  tanh_backward(dh1, enc.hidden1);
  kernels::parallel::dense_backward(
      x, params.layer(Layer::kEncoderHidden1), dh1, nullptr,
      params.grad_view(Layer::kEncoderHidden1, grad));
  return out;
}

}  // namespace rfib
