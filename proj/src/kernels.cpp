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

#include "rfib/kernels.hpp"

#include <exception>

#include "rfib/divergences.hpp"
#include "rfib/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rfib::kernels {
namespace {

// Below this many multiply-adds a region runs on the calling thread only.
constexpr long kParallelThreshold = 1L << 15;

void check_dense(const Matrix& x, const DenseLayerView& layer) {
  if (x.cols() != layer.in || layer.weights.size() != layer.in * layer.out ||
      layer.bias.size() != layer.out) {
    throw DimensionMismatch("dense layer shape does not match its input");
  }
}

inline void forward_row(const Matrix& x, const DenseLayerView& layer,
                        Matrix& y, std::size_t r) {
  const auto xr = x.row(r);
  auto yr = y.row(r);
  for (std::size_t o = 0; o < layer.out; ++o) {
    const double* w = layer.weights.data() + o * layer.in;
    // Four partial sums in a fixed order; both kernel variants share this.
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    std::size_t k = 0;
    for (; k + 4 <= layer.in; k += 4) {
      a0 += w[k] * xr[k];
      a1 += w[k + 1] * xr[k + 1];
      a2 += w[k + 2] * xr[k + 2];
      a3 += w[k + 3] * xr[k + 3];
    }
    for (; k < layer.in; ++k) a0 += w[k] * xr[k];
    yr[o] = layer.bias[o] + ((a0 + a1) + (a2 + a3));
  }
}

inline void input_grad_row(const DenseLayerView& layer, const Matrix& dy,
                           Matrix& dx, std::size_t r) {
  auto dxr = dx.row(r);
  const auto dyr = dy.row(r);
  for (std::size_t k = 0; k < layer.in; ++k) dxr[k] = 0.0;
  for (std::size_t o = 0; o < layer.out; ++o) {
    const double g = dyr[o];
    const double* w = layer.weights.data() + o * layer.in;
    for (std::size_t k = 0; k < layer.in; ++k) dxr[k] += g * w[k];
  }
}

// Gradient of one output unit: sums over rows in ascending order.
inline void weight_grad_unit(const Matrix& x, const DenseLayerView& layer,
                             const Matrix& dy, DenseGradView grad,
                             std::size_t o) {
  double* gw = grad.weights.data() + o * layer.in;
  for (std::size_t k = 0; k < layer.in; ++k) gw[k] = 0.0;
  double gb = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double g = dy(r, o);
    const auto xr = x.row(r);
    for (std::size_t k = 0; k < layer.in; ++k) gw[k] += g * xr[k];
    gb += g;
  }
  grad.bias[o] = gb;
}

inline void divergence_row(const Matrix& mu, const Matrix& var, double gamma2,
                           double alpha, std::vector<double>& values,
                           Matrix* d_mu, Matrix* d_var, std::size_t r) {
  values[r] = detail::renyi_row(mu.row(r), var.row(r), gamma2, alpha);
  if (d_mu != nullptr && d_var != nullptr) {
    detail::renyi_row_grad(mu.row(r), var.row(r), gamma2, alpha, d_mu->row(r),
                           d_var->row(r));
  }
}

void prepare_divergence(const Matrix& mu, const Matrix& var,
                        std::vector<double>& values, Matrix* d_mu,
                        Matrix* d_var) {
  if (mu.rows() != var.rows() || mu.cols() != var.cols()) {
    throw DimensionMismatch("mu and var matrices differ in shape");
  }
  values.assign(mu.rows(), 0.0);
  if (d_mu != nullptr) *d_mu = Matrix(mu.rows(), mu.cols());
  if (d_var != nullptr) *d_var = Matrix(mu.rows(), mu.cols());
}

}  // namespace

namespace serial {

void dense_forward(const Matrix& x, const DenseLayerView& layer, Matrix& y) {
  check_dense(x, layer);
  y = Matrix(x.rows(), layer.out);
  for (std::size_t r = 0; r < x.rows(); ++r) forward_row(x, layer, y, r);
}

void dense_backward(const Matrix& x, const DenseLayerView& layer,
                    const Matrix& dy, Matrix* dx, DenseGradView grad) {
  check_dense(x, layer);
  if (dx != nullptr) {
    *dx = Matrix(x.rows(), layer.in);
    for (std::size_t r = 0; r < x.rows(); ++r)
      input_grad_row(layer, dy, *dx, r);
  }
  for (std::size_t o = 0; o < layer.out; ++o)
    weight_grad_unit(x, layer, dy, grad, o);
}

void divergence_rows(const Matrix& mu, const Matrix& var, double gamma2,
                     double alpha, std::vector<double>& values, Matrix* d_mu,
                     Matrix* d_var) {
  prepare_divergence(mu, var, values, d_mu, d_var);
  for (std::size_t r = 0; r < mu.rows(); ++r)
    divergence_row(mu, var, gamma2, alpha, values, d_mu, d_var, r);
}

}  // namespace serial

namespace parallel {

void dense_forward(const Matrix& x, const DenseLayerView& layer, Matrix& y) {
  check_dense(x, layer);
  y = Matrix(x.rows(), layer.out);
  const long rows = static_cast<long>(x.rows());
  const long work = rows * static_cast<long>(layer.in * layer.out);
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
  for (long r = 0; r < rows; ++r) {
    forward_row(x, layer, y, static_cast<std::size_t>(r));
  }
}

void dense_backward(const Matrix& x, const DenseLayerView& layer,
                    const Matrix& dy, Matrix* dx, DenseGradView grad) {
  check_dense(x, layer);
  const long rows = static_cast<long>(x.rows());
  const long units = static_cast<long>(layer.out);
  const long work = rows * static_cast<long>(layer.in * layer.out);
  if (dx != nullptr) *dx = Matrix(x.rows(), layer.in);
#pragma omp parallel if (work > kParallelThreshold)
  {
    if (dx != nullptr) {
#pragma omp for schedule(static) nowait
      for (long r = 0; r < rows; ++r) {
        input_grad_row(layer, dy, *dx, static_cast<std::size_t>(r));
      }
    }
#pragma omp for schedule(static)
    for (long o = 0; o < units; ++o) {
      weight_grad_unit(x, layer, dy, grad, static_cast<std::size_t>(o));
    }
  }
}

void divergence_rows(const Matrix& mu, const Matrix& var, double gamma2,
                     double alpha, std::vector<double>& values, Matrix* d_mu,
                     Matrix* d_var) {
  prepare_divergence(mu, var, values, d_mu, d_var);
  const long rows = static_cast<long>(mu.rows());
  const long work = rows * static_cast<long>(mu.cols()) * 16;
  // Exceptions cannot leave an OpenMP region; keep one slot per row and
  // rethrow the lowest failing row so the error matches the serial path.
  std::vector<std::exception_ptr> failures(mu.rows());
#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
  for (long r = 0; r < rows; ++r) {
    try {
      divergence_row(mu, var, gamma2, alpha, values, d_mu, d_var,
                     static_cast<std::size_t>(r));
    } catch (...) {
      failures[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace rfib::kernels
