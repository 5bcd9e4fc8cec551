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

// Labelled tabular data: a seeded synthetic generator for the
// missing-subgroup regime, and CSV ingestion.

#ifndef RFIB_DATASETS_HPP_
#define RFIB_DATASETS_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rfib/matrix.hpp"

namespace rfib {

struct Dataset {
  Matrix x;
  std::vector<int> y;
  std::vector<int> s;
  std::string provenance;

  std::size_t size() const { return y.size(); }
  std::size_t features() const { return x.cols(); }
  std::size_t cell_count(int y_value, int s_value) const;
  Dataset subset(std::span<const std::size_t> rows) const;
  // Throws on inconsistent lengths, non-binary labels or non-finite features.
  void validate() const;
};

using Cell = std::pair<int, int>;  // (y, s)
using CellCounts = std::array<std::array<std::size_t, 2>, 2>;  // [y][s]

// Each example in cell (y, s) is y * signal_shift + s * bias_shift + eps with
// eps ~ N(0, noise_sd^2 I).
struct SyntheticSpec {
  std::size_t p = 16;
  CellCounts n_per_cell{{{2000, 1000}, {1000, 1000}}};
  std::vector<double> signal_shift;
  std::vector<double> bias_shift;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  std::size_t test_per_cell = 250;
  Cell held_out_cell{1, 1};

  // Default spec: p = 16, a norm-2 signal spread evenly over the first 8
  // coordinates, a norm-1.5 bias channel over the last 8, unit noise.
  static SyntheticSpec defaults();
  void validate() const;
};

nlohmann::json to_json(const SyntheticSpec& spec);
// Missing keys take defaults; unknown keys raise InvalidSpec naming the key.
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

Dataset generate(const SyntheticSpec& spec);

struct SplitData {
  Dataset train;
  Dataset test;
};

// Train: n_per_cell with held_out_cell emptied. Test: test_per_cell fresh
// draws in every cell. Train and test use disjoint RNG streams.
SplitData missing_subgroup_split(const SyntheticSpec& spec, Cell held_out_cell);

// Header names the feature columns plus "y" and "s".
Dataset load_csv(const std::string& path);
// Features are written with 17 significant digits.
void write_csv(const Dataset& data, const std::string& path);

}  // namespace rfib

#endif  // RFIB_DATASETS_HPP_
