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

#include <gtest/gtest.h>

#include <random>

#include "rfib/divergences.hpp"
#include "rfib/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rfib::kernels {
namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double lo = -1.0,
                     double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(r, c);
  for (double& v : m.flat()) v = dist(rng);
  return m;
}

class KernelsTest : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
#ifdef _OPENMP
    omp_set_num_threads(GetParam());
#endif
  }
};

TEST_P(KernelsTest, DenseForwardParallelMatchesSerialBitwise) {
  std::mt19937_64 rng(1);
  for (auto [n, in, out] : {std::tuple<std::size_t, std::size_t, std::size_t>{5, 4, 3},
                            {64, 100, 100}, {257, 33, 64}}) {
    const Matrix x = random_matrix(rng, n, in);
    const Matrix w = random_matrix(rng, out, in);
    const Matrix b = random_matrix(rng, out, 1);
    const DenseLayerView layer{w.flat(), b.flat(), in, out};
    Matrix ys, yp;
    serial::dense_forward(x, layer, ys);
    parallel::dense_forward(x, layer, yp);
    EXPECT_EQ(ys, yp);
    // Spot check against the definition.
    double acc = b(1, 0);
    for (std::size_t k = 0; k < in; ++k) acc += w(1, k) * x(n - 1, k);
    EXPECT_NEAR(ys(n - 1, 1), acc, 1e-13);
  }
}

TEST_P(KernelsTest, DenseBackwardParallelMatchesSerialBitwise) {
  std::mt19937_64 rng(2);
  for (auto [n, in, out] : {std::tuple<std::size_t, std::size_t, std::size_t>{5, 4, 3},
                            {64, 100, 100}, {300, 64, 32}}) {
    const Matrix x = random_matrix(rng, n, in);
    const Matrix w = random_matrix(rng, out, in);
    const Matrix b = random_matrix(rng, out, 1);
    const Matrix dy = random_matrix(rng, n, out);
    const DenseLayerView layer{w.flat(), b.flat(), in, out};
    Matrix gws(out, in), gbs(out, 1), gwp(out, in), gbp(out, 1);
    Matrix dxs, dxp;
    serial::dense_backward(x, layer, dy, &dxs, {gws.flat(), gbs.flat()});
    parallel::dense_backward(x, layer, dy, &dxp, {gwp.flat(), gbp.flat()});
    EXPECT_EQ(dxs, dxp);
    EXPECT_EQ(gws, gwp);
    EXPECT_EQ(gbs, gbp);
    double db = 0.0;
    for (std::size_t r = 0; r < n; ++r) db += dy(r, 2);
    EXPECT_DOUBLE_EQ(gbs(2, 0), db);
  }
}

TEST_P(KernelsTest, DivergenceRowsParallelMatchesSerialBitwise) {
  std::mt19937_64 rng(3);
  const Matrix mu = random_matrix(rng, 500, 32, -2.0, 2.0);
  const Matrix var = random_matrix(rng, 500, 32, 0.05, 0.95);
  for (double alpha : {0.0, 0.5, 1.0, 1.8}) {
    std::vector<double> vs, vp;
    Matrix dms, dvs, dmp, dvp;
    serial::divergence_rows(mu, var, 1.0, alpha, vs, &dms, &dvs);
    parallel::divergence_rows(mu, var, 1.0, alpha, vp, &dmp, &dvp);
    EXPECT_EQ(vs, vp);
    EXPECT_EQ(dms, dmp);
    EXPECT_EQ(dvs, dvp);
    const DiagGaussian row{{mu.row(7).begin(), mu.row(7).end()},
                           {var.row(7).begin(), var.row(7).end()}};
    EXPECT_EQ(vs[7], renyi_div(row, {1.0, 32}, Alpha(alpha)));
  }
}

TEST_P(KernelsTest, DivergenceRowsRethrowsFromInvalidRow) {
  std::mt19937_64 rng(4);
  const Matrix mu = random_matrix(rng, 400, 32);
  Matrix var = random_matrix(rng, 400, 32, 0.1, 0.9);
  var(250, 3) = 5.0;  // exceeds 2*1/(2-1)
  std::vector<double> v;
  EXPECT_THROW(parallel::divergence_rows(mu, var, 1.0, 2.0, v, nullptr, nullptr),
               ValidityViolation);
  EXPECT_THROW(serial::divergence_rows(mu, var, 1.0, 2.0, v, nullptr, nullptr),
               ValidityViolation);
}

INSTANTIATE_TEST_SUITE_P(Threads, KernelsTest, ::testing::Values(1, 4));

TEST(KernelsShapeTest, RejectsMismatchedLayer) {
  const Matrix x(2, 3);
  const Matrix w(4, 2);
  const Matrix b(4, 1);
  Matrix y;
  EXPECT_THROW(serial::dense_forward(x, {w.flat(), b.flat(), 3, 4}, y), DimensionMismatch);
  EXPECT_THROW(parallel::dense_forward(x, {w.flat(), b.flat(), 3, 4}, y), DimensionMismatch);
}

}  // namespace
}  // namespace rfib::kernels
