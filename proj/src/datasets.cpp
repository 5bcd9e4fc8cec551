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

#include "rfib/datasets.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rfib/error.hpp"
#include "rfib/io.hpp"

namespace rfib {
namespace {

constexpr std::uint64_t kGenerateStream = 0;
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kTestStream = 2;

std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// FNV-1a, for a stable provenance tag.
std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Dataset draw(const SyntheticSpec& spec, const CellCounts& counts,
             std::uint64_t stream, const std::string& tag) {
  std::size_t total = 0;
  for (const auto& row : counts)
    for (std::size_t c : row) total += c;

  Dataset out;
  out.x = Matrix(total, spec.p);
  out.y.reserve(total);
  out.s.reserve(total);
  auto engine = stream_engine(spec.seed, stream);
  std::normal_distribution<double> noise(0.0, spec.noise_sd);
  std::size_t r = 0;
  for (int y = 0; y < 2; ++y) {
    for (int s = 0; s < 2; ++s) {
      for (std::size_t k = 0; k < counts[y][s]; ++k, ++r) {
        auto row = out.x.row(r);
        for (std::size_t j = 0; j < spec.p; ++j) {
          row[j] = y * spec.signal_shift[j] + s * spec.bias_shift[j] +
                   noise(engine);
        }
        out.y.push_back(y);
        out.s.push_back(s);
      }
    }
  }
  std::ostringstream prov;
  prov << "synthetic:" << std::hex << fnv1a(to_json(spec).dump()) << ":"
       << tag;
  out.provenance = prov.str();
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(0, 1);
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::size_t Dataset::cell_count(int y_value, int s_value) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == y_value && s[i] == s_value) ++n;
  }
  return n;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.x = Matrix(rows.size(), x.cols());
  out.y.reserve(rows.size());
  out.s.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = x.row(rows[i]);
    std::copy(src.begin(), src.end(), out.x.row(i).begin());
    out.y.push_back(y[rows[i]]);
    out.s.push_back(s[rows[i]]);
  }
  out.provenance = provenance;
  return out;
}

void Dataset::validate() const {
  if (y.size() != x.rows() || s.size() != x.rows()) {
    throw LengthMismatch("dataset has " + std::to_string(x.rows()) +
                         " rows but " + std::to_string(y.size()) + " labels");
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if ((y[i] != 0 && y[i] != 1) || (s[i] != 0 && s[i] != 1)) {
      throw ConfigError("labels y and s must be binary");
    }
  }
  for (double v : x.flat()) {
    if (!std::isfinite(v)) throw ConfigError("non-finite feature value");
  }
}

SyntheticSpec SyntheticSpec::defaults() {
  SyntheticSpec spec;
  spec.p = 16;
  spec.signal_shift.assign(16, 0.0);
  spec.bias_shift.assign(16, 0.0);
  const double signal = 2.0 / std::sqrt(8.0);
  const double bias = 1.5 / std::sqrt(8.0);
  for (std::size_t j = 0; j < 8; ++j) spec.signal_shift[j] = signal;
  for (std::size_t j = 8; j < 16; ++j) spec.bias_shift[j] = bias;
  return spec;
}

void SyntheticSpec::validate() const {
  if (p == 0) throw InvalidSpec("p must be >= 1");
  if (signal_shift.size() != p) {
    throw InvalidSpec("signal_shift must have length p = " +
                      std::to_string(p));
  }
  if (bias_shift.size() != p) {
    throw InvalidSpec("bias_shift must have length p = " + std::to_string(p));
  }
  for (double v : signal_shift)
    if (!std::isfinite(v)) throw InvalidSpec("signal_shift must be finite");
  for (double v : bias_shift)
    if (!std::isfinite(v)) throw InvalidSpec("bias_shift must be finite");
  if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) {
    throw InvalidSpec("noise_sd must be > 0");
  }
  int nonempty = 0;
  for (const auto& row : n_per_cell)
    for (std::size_t c : row) nonempty += c > 0 ? 1 : 0;
  if (nonempty < 2) throw InvalidSpec("n_per_cell needs >= 2 nonempty cells");
  auto binary = [](int v) { return v == 0 || v == 1; };
  if (!binary(held_out_cell.first) || !binary(held_out_cell.second)) {
    throw InvalidSpec("held_out_cell must be a binary (y, s) pair");
  }
}

nlohmann::json to_json(const SyntheticSpec& spec) {
  nlohmann::json j;
  j["p"] = spec.p;
  j["n_per_cell"] = {{spec.n_per_cell[0][0], spec.n_per_cell[0][1]},
                     {spec.n_per_cell[1][0], spec.n_per_cell[1][1]}};
  j["signal_shift"] = spec.signal_shift;
  j["bias_shift"] = spec.bias_shift;
  j["noise_sd"] = spec.noise_sd;
  j["seed"] = spec.seed;
  j["test_per_cell"] = spec.test_per_cell;
  j["held_out_cell"] = {spec.held_out_cell.first, spec.held_out_cell.second};
  return j;
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidSpec("synthetic spec must be a JSON object");
  static const std::vector<std::string> kKeys = {
      "p",    "n_per_cell", "signal_shift",  "bias_shift",
      "noise_sd", "seed",   "test_per_cell", "held_out_cell"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw InvalidSpec("unknown key '" + key + "' in synthetic spec");
    }
  }
  const std::size_t p = j.value("p", std::size_t{16});
  SyntheticSpec spec = SyntheticSpec::defaults();
  if (p != spec.p) {
    // Same layout scaled to p: signal over the first half, bias over the rest.
    const std::size_t half = std::max<std::size_t>(p / 2, 1);
    spec.p = p;
    spec.signal_shift.assign(p, 0.0);
    spec.bias_shift.assign(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
      if (i < half) {
        spec.signal_shift[i] = 2.0 / std::sqrt(static_cast<double>(half));
      } else {
        spec.bias_shift[i] =
            1.5 / std::sqrt(static_cast<double>(p - half));
      }
    }
  }
  auto field = [&](const char* key, auto fallback) {
    try {
      return j.value(key, fallback);
    } catch (const nlohmann::json::exception&) {
      throw InvalidSpec(std::string("key '") + key + "' has the wrong type");
    }
  };
  try {
    if (j.contains("n_per_cell")) {
      const auto& cells = j.at("n_per_cell");
      if (!cells.is_array() || cells.size() != 2 || cells[0].size() != 2 ||
          cells[1].size() != 2) {
        throw InvalidSpec("key 'n_per_cell' must be [[n00, n01], [n10, n11]]");
      }
      for (int y = 0; y < 2; ++y)
        for (int s = 0; s < 2; ++s)
          spec.n_per_cell[y][s] = cells[y][s].get<std::size_t>();
    }
    if (j.contains("held_out_cell")) {
      const auto& cell = j.at("held_out_cell");
      if (!cell.is_array() || cell.size() != 2) {
        throw InvalidSpec("key 'held_out_cell' must be [y, s]");
      }
      spec.held_out_cell = {cell[0].get<int>(), cell[1].get<int>()};
    }
  } catch (const nlohmann::json::exception&) {
    throw InvalidSpec("key 'n_per_cell' or 'held_out_cell' has the wrong type");
  }
  spec.signal_shift = field("signal_shift", spec.signal_shift);
  spec.bias_shift = field("bias_shift", spec.bias_shift);
  spec.noise_sd = field("noise_sd", spec.noise_sd);
  spec.seed = field("seed", spec.seed);
  spec.test_per_cell = field("test_per_cell", spec.test_per_cell);
  spec.validate();
  return spec;
}

Dataset generate(const SyntheticSpec& spec) {
  spec.validate();
  return draw(spec, spec.n_per_cell, kGenerateStream, "all");
}

SplitData missing_subgroup_split(const SyntheticSpec& spec,
                                 Cell held_out_cell) {
  SyntheticSpec checked = spec;
  checked.held_out_cell = held_out_cell;
  checked.validate();
  CellCounts train_counts = spec.n_per_cell;
  train_counts[held_out_cell.first][held_out_cell.second] = 0;
  CellCounts test_counts{};
  for (auto& row : test_counts) row.fill(spec.test_per_cell);
  return {draw(checked, train_counts, kTrainStream, "train"),
          draw(checked, test_counts, kTestStream, "test")};
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1);
  const auto header = split_fields(line);
  int col_y = -1;
  int col_s = -1;
  std::vector<std::size_t> feature_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "y") {
      col_y = static_cast<int>(i);
    } else if (header[i] == "s") {
      col_s = static_cast<int>(i);
    } else {
      feature_cols.push_back(i);
    }
  }
  if (col_y < 0 || col_s < 0) {
    throw ParseError("header must contain columns 'y' and 's'", 1);
  }
  if (feature_cols.empty()) throw ParseError("no feature columns", 1);

  std::vector<double> values;
  Dataset out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t c : feature_cols) {
      const std::string& f = fields[c];
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size() || errno == ERANGE ||
          !std::isfinite(v)) {
        throw ParseError("bad number '" + f + "' in column '" + header[c] + "'",
                         line_no);
      }
      values.push_back(v);
    }
    auto label = [&](int col, const char* name) {
      const std::string& f = fields[static_cast<std::size_t>(col)];
      if (f == "0") return 0;
      if (f == "1") return 1;
      throw NonBinaryLabel(std::string("column '") + name + "' value '" + f +
                               "' is not 0 or 1",
                           line_no);
    };
    out.y.push_back(label(col_y, "y"));
    out.s.push_back(label(col_s, "s"));
  }
  out.x = Matrix(out.y.size(), feature_cols.size());
  std::copy(values.begin(), values.end(), out.x.data());
  out.provenance = path;
  return out;
}

void write_csv(const Dataset& data, const std::string& path) {
  data.validate();
  std::string text;
  for (std::size_t j = 0; j < data.features(); ++j) {
    text += "x" + std::to_string(j) + ",";
  }
  text += "y,s\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.x.row(i)) {
      text += format_double(v);
      text += ',';
    }
    text += std::to_string(data.y[i]) + "," + std::to_string(data.s[i]) + "\n";
  }
  write_file_atomic(path, text);
}

}  // namespace rfib
