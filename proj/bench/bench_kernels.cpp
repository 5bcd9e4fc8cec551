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

// Serial reference kernels against their OpenMP counterparts. The range
// argument is the batch size; layer widths match the decoder heads.

#include <benchmark/benchmark.h>

#include <random>

#include "rfib/kernels.hpp"
#include "rfib/matrix.hpp"

namespace {

using rfib::Matrix;
namespace kernels = rfib::kernels;

constexpr std::size_t kWidth = 100;
constexpr std::size_t kLatent = 32;

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed,
                     double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(r, c);
  for (double& v : m.flat()) v = dist(rng);
  return m;
}

struct Layer {
  Matrix w = random_matrix(kWidth, kWidth, 1);
  Matrix b = random_matrix(kWidth, 1, 2);
  kernels::DenseLayerView view() const {
    return {w.flat(), b.flat(), kWidth, kWidth};
  }
};

template <auto Forward>
void BM_DenseForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Layer layer;
  const Matrix x = random_matrix(n, kWidth, 3);
  Matrix y;
  for (auto _ : state) {
    Forward(x, layer.view(), y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <auto Backward>
void BM_DenseBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Layer layer;
  const Matrix x = random_matrix(n, kWidth, 3);
  const Matrix dy = random_matrix(n, kWidth, 4);
  Matrix gw(kWidth, kWidth), gb(kWidth, 1), dx;
  for (auto _ : state) {
    Backward(x, layer.view(), dy, &dx, {gw.flat(), gb.flat()});
    benchmark::DoNotOptimize(gw.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <auto Rows>
void BM_DivergenceRows(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix mu = random_matrix(n, kLatent, 5);
  const Matrix var = random_matrix(n, kLatent, 6, 0.1, 0.9);
  std::vector<double> values;
  Matrix d_mu, d_var;
  for (auto _ : state) {
    Rows(mu, var, 1.0, 0.7, values, &d_mu, &d_var);
    benchmark::DoNotOptimize(values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

}  // namespace

BENCHMARK(BM_DenseForward<kernels::serial::dense_forward>)
    ->Name("dense_forward/serial")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_DenseForward<kernels::parallel::dense_forward>)
    ->Name("dense_forward/parallel")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_DenseBackward<kernels::serial::dense_backward>)
    ->Name("dense_backward/serial")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_DenseBackward<kernels::parallel::dense_backward>)
    ->Name("dense_backward/parallel")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_DivergenceRows<kernels::serial::divergence_rows>)
    ->Name("divergence_rows/serial")->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_DivergenceRows<kernels::parallel::divergence_rows>)
    ->Name("divergence_rows/parallel")->RangeMultiplier(4)->Range(64, 4096);

BENCHMARK_MAIN();
