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

// Data-parallel kernels behind the model's forward and backward passes.
//
// Every kernel exists twice: `serial` is the reference implementation and
// `parallel` is the OpenMP version used by the model. The parallel versions
// split work only across independent outputs and keep each output's
// summation order identical to the serial loop, so both produce bit-identical
// results for any thread count.

#ifndef RFIB_KERNELS_HPP_
#define RFIB_KERNELS_HPP_

#include <span>
#include <vector>

#include "rfib/matrix.hpp"

namespace rfib::kernels {

// Shapes: x is N x in, weights is out x in (row-major), bias has length out,
// y is N x out.
struct DenseLayerView {
  std::span<const double> weights;
  std::span<const double> bias;
  std::size_t in = 0;
  std::size_t out = 0;
};

struct DenseGradView {
  std::span<double> weights;
  std::span<double> bias;
};

namespace serial {

void dense_forward(const Matrix& x, const DenseLayerView& layer, Matrix& y);
// Overwrites grad; dx is skipped when null.
void dense_backward(const Matrix& x, const DenseLayerView& layer,
                    const Matrix& dy, Matrix* dx, DenseGradView grad);
// Per-row Renyi divergences; d_mu / d_var are filled when non-null.
void divergence_rows(const Matrix& mu, const Matrix& var, double gamma2,
                     double alpha, std::vector<double>& values, Matrix* d_mu,
                     Matrix* d_var);

}  // namespace serial

namespace parallel {

void dense_forward(const Matrix& x, const DenseLayerView& layer, Matrix& y);
void dense_backward(const Matrix& x, const DenseLayerView& layer,
                    const Matrix& dy, Matrix* dx, DenseGradView grad);
void divergence_rows(const Matrix& mu, const Matrix& var, double gamma2,
                     double alpha, std::vector<double>& values, Matrix* d_mu,
                     Matrix* d_var);

}  // namespace parallel

// Number of threads OpenMP would use for a kernel region (1 without OpenMP).
int max_threads();

}  // namespace rfib::kernels

#endif  // RFIB_KERNELS_HPP_
