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

#include "rfib/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rfib/error.hpp"

namespace rfib {
namespace {

struct LayerShape {
  const char* name;
  std::size_t out;
  std::size_t in;
};

std::array<LayerShape, kNumLayers> layer_shapes(const Architecture& a) {
  const std::size_t h = a.encoder_hidden;
  const std::size_t k = a.head_hidden;
  const std::size_t d = a.latent_dim;
  return {{
      {"encoder.hidden1", h, a.input_dim},
      {"encoder.hidden2", h, h},
      {"encoder.mu", d, h},
      {"encoder.sigma", d, h},
      {"head_f.hidden1", k, d},
      {"head_f.hidden2", k, k},
      {"head_f.out", 1, k},
      {"head_g.hidden1", k, d + 1},
      {"head_g.hidden2", k, k},
      {"head_g.out", 1, k},
  }};
}

void tanh_inplace(Matrix& m) {
  for (double& v : m.flat()) v = std::tanh(v);
}

void require_finite(const Matrix& m, const char* what) {
  for (double v : m.flat()) {
    if (!std::isfinite(v)) {
      throw NonFiniteActivation(std::string("non-finite value in ") + what);
    }
  }
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix dense(const ModelParams& params, Layer which, const Matrix& x) {
  Matrix y;
  kernels::parallel::dense_forward(x, params.layer(which), y);
  return y;
}

HeadPass head_forward(const ModelParams& params, Layer first, Matrix input) {
  const auto base = static_cast<std::size_t>(first);
  HeadPass pass;
  pass.input = std::move(input);
  pass.hidden1 = dense(params, static_cast<Layer>(base), pass.input);
  tanh_inplace(pass.hidden1);
  pass.hidden2 = dense(params, static_cast<Layer>(base + 1), pass.hidden1);
  tanh_inplace(pass.hidden2);
  const Matrix out = dense(params, static_cast<Layer>(base + 2), pass.hidden2);
  require_finite(out, "decoder head");
  pass.logit.assign(out.flat().begin(), out.flat().end());
  pass.prob.resize(pass.logit.size());
  for (std::size_t i = 0; i < pass.logit.size(); ++i) {
    pass.prob[i] = sigmoid(pass.logit[i]);
  }
  return pass;
}

}  // namespace

void ModelParams::build_slices() {
  slices_.clear();
  std::size_t offset = 0;
  for (const auto& shape : layer_shapes(arch_)) {
    slices_.push_back({std::string(shape.name) + ".weight", offset, shape.out,
                       shape.in});
    offset += shape.out * shape.in;
    slices_.push_back({std::string(shape.name) + ".bias", offset, shape.out, 1});
    offset += shape.out;
  }
}

ModelParams ModelParams::zeros(const Architecture& arch) {
  if (arch.input_dim == 0 || arch.latent_dim == 0 ||
      arch.encoder_hidden == 0 || arch.head_hidden == 0) {
    throw ConfigError("architecture dimensions must all be >= 1");
  }
  ModelParams p;
  p.arch_ = arch;
  p.build_slices();
  const auto& last = p.slices_.back();
  p.values_.assign(last.offset + last.length(), 0.0);
  return p;
}

ModelParams ModelParams::initialize(const Architecture& arch,
                                    std::uint64_t seed) {
  ModelParams p = zeros(arch);
  std::mt19937_64 engine(seed);
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    const ParamSlice& w = p.slices_[2 * l];
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t s = 2 * l; s < 2 * l + 2; ++s) {
      const ParamSlice& slice = p.slices_[s];
      for (std::size_t i = 0; i < slice.length(); ++i) {
        p.values_[slice.offset + i] = dist(engine);
      }
    }
  }
  return p;
}

ModelParams ModelParams::from_flat(const Architecture& arch,
                                   std::vector<double> values) {
  ModelParams p = zeros(arch);
  if (values.size() != p.values_.size()) {
    throw DimensionMismatch("flat parameter vector has " +
                            std::to_string(values.size()) +
                            " entries, architecture needs " +
                            std::to_string(p.values_.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw FormatError("non-finite model parameter");
  }
  p.values_ = std::move(values);
  return p;
}

kernels::DenseLayerView ModelParams::layer(Layer which) const {
  const auto l = static_cast<std::size_t>(which);
  const ParamSlice& w = slices_.at(2 * l);
  const ParamSlice& b = slices_.at(2 * l + 1);
  return {std::span<const double>(values_).subspan(w.offset, w.length()),
          std::span<const double>(values_).subspan(b.offset, b.length()),
          w.cols, w.rows};
}

kernels::DenseGradView ModelParams::grad_view(Layer which,
                                              std::span<double> grad) const {
  const auto l = static_cast<std::size_t>(which);
  const ParamSlice& w = slices_.at(2 * l);
  const ParamSlice& b = slices_.at(2 * l + 1);
  return {grad.subspan(w.offset, w.length()),
          grad.subspan(b.offset, b.length())};
}

NoiseSource::NoiseSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

void NoiseSource::fill(Matrix& out) {
  for (double& v : out.flat()) v = normal_(engine_);
  draws_ += out.size();
}

void NoiseSource::reset() {
  engine_.seed(seed_);
  normal_.reset();
  draws_ = 0;
}

EncodedBatch encode(const ModelParams& params, const Matrix& x,
                    const RfibConfig& cfg, NoiseSource& noise) {
  Matrix draws(std::max<std::size_t>(cfg.mc_samples, 1) * x.rows(), cfg.d);
  noise.fill(draws);
  return encode_with_noise(params, x, cfg, std::move(draws));
}

EncodedBatch encode_with_noise(const ModelParams& params, const Matrix& x,
                               const RfibConfig& cfg, Matrix noise) {
  const Architecture& arch = params.arch();
  if (cfg.d != arch.latent_dim) {
    throw DimensionMismatch("config d=" + std::to_string(cfg.d) +
                            " but model latent dimension is " +
                            std::to_string(arch.latent_dim));
  }
  if (x.cols() != arch.input_dim) {
    throw DimensionMismatch("input has " + std::to_string(x.cols()) +
                            " features, model expects " +
                            std::to_string(arch.input_dim));
  }
  require_finite(x, "encoder input");

  EncodedBatch enc;
  enc.hidden1 = dense(params, Layer::kEncoderHidden1, x);
  tanh_inplace(enc.hidden1);
  enc.hidden2 = dense(params, Layer::kEncoderHidden2, enc.hidden1);
  tanh_inplace(enc.hidden2);
  enc.mu = dense(params, Layer::kEncoderMu, enc.hidden2);
  enc.sigma_pre = dense(params, Layer::kEncoderSigma, enc.hidden2);

  const bool bounded = cfg.alpha.value() > 1.0;
  const std::size_t n = x.rows();
  const std::size_t d = arch.latent_dim;
  enc.var = Matrix(n, d);
  enc.sigma = Matrix(n, d);
  for (std::size_t i = 0; i < enc.var.size(); ++i) {
    const double pre = enc.sigma_pre.data()[i];
    const double v = bounded ? sigmoid(pre) : softplus(pre);
    enc.var.data()[i] = v;
    enc.sigma.data()[i] = std::sqrt(v);
  }
  require_finite(enc.mu, "encoder mean");
  require_finite(enc.var, "encoder variance");

  const std::size_t m = std::max<std::size_t>(cfg.mc_samples, 1);
  if (noise.rows() != m * n || noise.cols() != d) {
    throw DimensionMismatch("noise must be " + std::to_string(m * n) + " x " +
                            std::to_string(d));
  }
  enc.noise = std::move(noise);
  enc.z = Matrix(m * n, d);
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto mu = enc.mu.row(i);
      const auto sd = enc.sigma.row(i);
      const auto e = enc.noise.row(s * n + i);
      auto z = enc.z.row(s * n + i);
      for (std::size_t j = 0; j < d; ++j) z[j] = mu[j] + sd[j] * e[j];
    }
  }
  return enc;
}

Matrix encode_mean(const ModelParams& params, const Matrix& x) {
  if (x.cols() != params.arch().input_dim) {
    throw DimensionMismatch("input has " + std::to_string(x.cols()) +
                            " features, model expects " +
                            std::to_string(params.arch().input_dim));
  }
  require_finite(x, "encoder input");
  Matrix h = dense(params, Layer::kEncoderHidden1, x);
  tanh_inplace(h);
  Matrix h2 = dense(params, Layer::kEncoderHidden2, h);
  tanh_inplace(h2);
  Matrix mu = dense(params, Layer::kEncoderMu, h2);
  require_finite(mu, "encoder mean");
  return mu;
}

namespace detail {

HeadPass head_f_forward(const ModelParams& params, const Matrix& z) {
  if (z.cols() != params.arch().latent_dim) {
    throw DimensionMismatch("z width does not match the latent dimension");
  }
  require_finite(z, "representation");
  return head_forward(params, Layer::kHeadFHidden1, z);
}

HeadPass head_g_forward(const ModelParams& params, const Matrix& z,
                        std::span<const int> s) {
  const std::size_t d = params.arch().latent_dim;
  if (z.cols() != d) {
    throw DimensionMismatch("z width does not match the latent dimension");
  }
  if (s.size() != z.rows()) {
    throw LengthMismatch("s has " + std::to_string(s.size()) +
                         " entries for " + std::to_string(z.rows()) + " rows");
  }
  require_finite(z, "representation");
  Matrix input(z.rows(), d + 1);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    if (s[i] != 0 && s[i] != 1) throw ConfigError("s must be binary");
    auto row = input.row(i);
    const auto zr = z.row(i);
    std::copy(zr.begin(), zr.end(), row.begin());
    row[d] = static_cast<double>(s[i]);
  }
  return head_forward(params, Layer::kHeadGHidden1, std::move(input));
}

std::vector<int> tile(std::span<const int> v, std::size_t times) {
  std::vector<int> out;
  out.reserve(v.size() * times);
  for (std::size_t t = 0; t < times; ++t) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace detail

std::vector<double> decode_y(const ModelParams& params, const Matrix& z) {
  return detail::head_f_forward(params, z).prob;
}

std::vector<double> decode_ys(const ModelParams& params, const Matrix& z,
                              std::span<const int> s) {
  return detail::head_g_forward(params, z, s).prob;
}

}  // namespace rfib
