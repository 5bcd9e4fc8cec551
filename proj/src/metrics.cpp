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

#include "rfib/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rfib/error.hpp"

namespace rfib {
namespace {

// counts[y][s] and positives[y][s] (y_hat = 1) over the record set.
struct CellCounts {
  std::array<std::array<double, 2>, 2> total{};
  std::array<std::array<double, 2>, 2> positive{};
  std::array<std::array<double, 2>, 2> correct{};

  double group_total(int s) const { return total[0][s] + total[1][s]; }
  double group_positive(int s) const {
    return positive[0][s] + positive[1][s];
  }
  double group_correct(int s) const { return correct[0][s] + correct[1][s]; }
};

CellCounts count(std::span<const PredictionRecord> records) {
  validate_records(records);
  CellCounts c;
  for (const auto& r : records) {
    c.total[r.y][r.s] += 1.0;
    c.positive[r.y][r.s] += r.y_hat;
    c.correct[r.y][r.s] += r.y_hat == r.y ? 1.0 : 0.0;
  }
  return c;
}

void require_groups(const CellCounts& c) {
  for (int s = 0; s < 2; ++s) {
    if (c.group_total(s) == 0.0) {
      throw MissingSubgroup("no records with s=" + std::to_string(s), s);
    }
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(0, 1);
    out.push_back(field);
  }
  return out;
}

}  // namespace

void validate_records(std::span<const PredictionRecord> records) {
  for (const auto& r : records) {
    const bool binary = (r.y_hat == 0 || r.y_hat == 1) &&
                        (r.y == 0 || r.y == 1) && (r.s == 0 || r.s == 1);
    if (!binary) throw ConfigError("prediction records must be binary");
  }
}

AccuracySummary accuracy_metrics(std::span<const PredictionRecord> records) {
  const CellCounts c = count(records);
  require_groups(c);
  const double a0 = c.group_correct(0) / c.group_total(0);
  const double a1 = c.group_correct(1) / c.group_total(1);
  AccuracySummary out;
  out.acc = (c.group_correct(0) + c.group_correct(1)) /
            (c.group_total(0) + c.group_total(1));
  out.acc_gap = std::abs(a0 - a1);
  out.acc_min = std::min(a0, a1);
  out.acc_min_group = a1 < a0 ? 1 : 0;
  return out;
}

double dp_gap(std::span<const PredictionRecord> records) {
  const CellCounts c = count(records);
  require_groups(c);
  return std::abs(c.group_positive(0) / c.group_total(0) -
                  c.group_positive(1) / c.group_total(1));
}

double eqodds_gap(std::span<const PredictionRecord> records) {
  const CellCounts c = count(records);
  for (int y = 0; y < 2; ++y) {
    for (int s = 0; s < 2; ++s) {
      if (c.total[y][s] == 0.0) throw MissingSubgroupCell(y, s);
    }
  }
  double gap = 0.0;
  for (int y = 0; y < 2; ++y) {
    const double r0 = c.positive[y][0] / c.total[y][0];
    const double r1 = c.positive[y][1] / c.total[y][1];
    gap = std::max(gap, std::abs(r0 - r1));
  }
  return gap;
}

double cai(double lambda, const BaselineSummary& baseline,
           const DebiasedSummary& debiased) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw LambdaOutOfRange("CAI lambda must lie in [0, 1], got " +
                           std::to_string(lambda));
  }
  return lambda * (baseline.acc_gap_b - debiased.acc_gap_d) +
         (1.0 - lambda) * (debiased.acc_d - baseline.acc_b);
}

MetricsReport compute_metrics(std::span<const PredictionRecord> records,
                              const std::optional<BaselineSummary>& baseline) {
  const AccuracySummary a = accuracy_metrics(records);
  MetricsReport m;
  m.acc = a.acc;
  m.acc_gap = a.acc_gap;
  m.acc_min = a.acc_min;
  m.acc_min_group = a.acc_min_group;
  m.dp_gap = dp_gap(records);
  m.eqodds_gap = eqodds_gap(records);
  if (baseline) {
    const DebiasedSummary d{100.0 * m.acc, 100.0 * m.acc_gap};
    m.cai_05 = cai(0.5, *baseline, d);
    m.cai_075 = cai(0.75, *baseline, d);
  }
  return m;
}

double ita(double lightness, double yellowness) {
  if (!std::isfinite(lightness) || !std::isfinite(yellowness)) {
    throw ConfigError("ITA inputs must be finite");
  }
  const double num = lightness - 50.0;
  if (num == 0.0 && yellowness == 0.0) {
    throw UndefinedIta("ITA is undefined at L = 50, b = 0");
  }
  return std::atan2(num, yellowness) * 180.0 / std::numbers::pi;
}

int dark_skin_flag(double ita_degrees, double threshold) {
  return ita_degrees <= threshold ? 1 : 0;
}

std::vector<PredictionRecord> load_predictions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  const auto header = split_csv_line(line);
  int col_hat = -1, col_y = -1, col_s = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "y_hat") col_hat = static_cast<int>(i);
    if (header[i] == "y") col_y = static_cast<int>(i);
    if (header[i] == "s") col_s = static_cast<int>(i);
  }
  if (col_hat < 0 || col_y < 0 || col_s < 0) {
    throw ParseError("header must name y_hat, y and s", 1);
  }
  std::vector<PredictionRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    auto binary = [&](int col) {
      const std::string& f = fields[static_cast<std::size_t>(col)];
      if (f == "0") return 0;
      if (f == "1") return 1;
      throw NonBinaryLabel("value '" + f + "' is not 0 or 1", line_no);
    };
    out.push_back({binary(col_hat), binary(col_y), binary(col_s)});
  }
  return out;
}

}  // namespace rfib
