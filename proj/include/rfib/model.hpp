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

// Encoder P(Z|X) and the two Bernoulli decoder heads.
//
//   encoder: x -> tanh(64) -> tanh(64) -> (mu in R^d, sigma pre-activation)
//   var = softplus(pre) for alpha <= 1, sigmoid(pre) for alpha > 1
//   z   = mu + sqrt(var) * e,  e ~ N(0, I)
//   f:  z      -> tanh(100) -> tanh(100) -> sigmoid   (Q(Y=1|Z))
//   g:  [z, s] -> tanh(100) -> tanh(100) -> sigmoid   (Q(Y=1|S,Z))
//
// All trainable weights live in one flat vector addressed through named
// slices so the optimiser, the checkpoint file and the gradient checker see
// the same layout.

#ifndef RFIB_MODEL_HPP_
#define RFIB_MODEL_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rfib/config.hpp"
#include "rfib/kernels.hpp"
#include "rfib/matrix.hpp"

namespace rfib {

struct Architecture {
  std::size_t input_dim = 0;
  std::size_t latent_dim = 32;
  std::size_t encoder_hidden = 64;
  std::size_t head_hidden = 100;

  bool operator==(const Architecture&) const = default;
};

struct ParamSlice {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;  // output units for weights, length for biases
  std::size_t cols = 0;  // input units for weights, 1 for biases
  std::size_t length() const { return rows * cols; }
};

// Dense layers in the order they appear in the flat vector.
enum class Layer : std::size_t {
  kEncoderHidden1 = 0,
  kEncoderHidden2,
  kEncoderMu,
  kEncoderSigma,
  kHeadFHidden1,
  kHeadFHidden2,
  kHeadFOut,
  kHeadGHidden1,
  kHeadGHidden2,
  kHeadGOut,
};
inline constexpr std::size_t kNumLayers = 10;

class ModelParams {
 public:
  ModelParams() = default;

  // All parameters zero.
  static ModelParams zeros(const Architecture& arch);
  // Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static ModelParams initialize(const Architecture& arch, std::uint64_t seed);
  // Rebuilds the slice table for `arch` around an existing flat vector.
  static ModelParams from_flat(const Architecture& arch,
                               std::vector<double> values);

  const Architecture& arch() const { return arch_; }
  const std::vector<ParamSlice>& slices() const { return slices_; }
  std::span<double> flat() { return values_; }
  std::span<const double> flat() const { return values_; }
  std::size_t size() const { return values_.size(); }

  kernels::DenseLayerView layer(Layer which) const;
  // View of the matching slices inside a gradient vector with this layout.
  kernels::DenseGradView grad_view(Layer which, std::span<double> grad) const;

  bool operator==(const ModelParams& other) const {
    return arch_ == other.arch_ && values_ == other.values_;
  }

 private:
  void build_slices();

  Architecture arch_;
  std::vector<ParamSlice> slices_;
  std::vector<double> values_;
};

// Seeded standard-normal draws for the reparameterisation. reset() replays
// the same sequence.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed = 0);
  void fill(Matrix& out);
  void reset();
  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// Forward state of the encoder for one batch. With mc_samples = M the rows
// of z and noise are M stacked N-row blocks (sample m of example i at row
// m*N + i).
struct EncodedBatch {
  Matrix mu;
  Matrix var;
  Matrix sigma;
  Matrix z;
  Matrix noise;

  // Intermediates kept for the backward pass.
  Matrix hidden1;
  Matrix hidden2;
  Matrix sigma_pre;

  std::size_t examples() const { return mu.rows(); }
  std::size_t samples() const {
    return mu.rows() == 0 ? 0 : z.rows() / mu.rows();
  }
};

// Forward state of one decoder head.
struct HeadPass {
  Matrix input;
  Matrix hidden1;
  Matrix hidden2;
  std::vector<double> logit;
  std::vector<double> prob;
};

EncodedBatch encode(const ModelParams& params, const Matrix& x,
                    const RfibConfig& cfg, NoiseSource& noise);
// Same, with the (mc_samples * N) x d standard-normal draws supplied.
EncodedBatch encode_with_noise(const ModelParams& params, const Matrix& x,
                               const RfibConfig& cfg, Matrix noise);
// Deterministic embedding (posterior means only).
Matrix encode_mean(const ModelParams& params, const Matrix& x);

std::vector<double> decode_y(const ModelParams& params, const Matrix& z);
std::vector<double> decode_ys(const ModelParams& params, const Matrix& z,
                              std::span<const int> s);

namespace detail {
HeadPass head_f_forward(const ModelParams& params, const Matrix& z);
HeadPass head_g_forward(const ModelParams& params, const Matrix& z,
                        std::span<const int> s);
// Repeats s so it lines up with M stacked sample blocks.
std::vector<int> tile(std::span<const int> v, std::size_t times);
}  // namespace detail

}  // namespace rfib

#endif  // RFIB_MODEL_HPP_
