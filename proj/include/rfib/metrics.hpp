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

// Utility and fairness measures over binary predictions with a binary
// sensitive attribute. Rates come from empirical frequencies; an empty
// subgroup is an error, never imputed.

#ifndef RFIB_METRICS_HPP_
#define RFIB_METRICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rfib {

struct PredictionRecord {
  int y_hat = 0;
  int y = 0;
  int s = 0;
};

struct AccuracySummary {
  double acc = 0.0;
  double acc_gap = 0.0;
  double acc_min = 0.0;
  int acc_min_group = 0;  // s value of the worse-off group
};

// Fractions in [0, 1] except cai_*, which are signed percent points and only
// present when a baseline was supplied.
struct MetricsReport {
  double acc = 0.0;
  double acc_gap = 0.0;
  double acc_min = 0.0;
  int acc_min_group = 0;
  double dp_gap = 0.0;
  double eqodds_gap = 0.0;
  std::optional<double> cai_05;
  std::optional<double> cai_075;
};

// Inputs in percent, as tabulated.
struct BaselineSummary {
  double acc_b = 0.0;
  double acc_gap_b = 0.0;
};

struct DebiasedSummary {
  double acc_d = 0.0;
  double acc_gap_d = 0.0;
};

void validate_records(std::span<const PredictionRecord> records);

AccuracySummary accuracy_metrics(std::span<const PredictionRecord> records);
// |P(Yhat=1|S=0) - P(Yhat=1|S=1)|
double dp_gap(std::span<const PredictionRecord> records);
// max over y of |P(Yhat=1|S=0,Y=y) - P(Yhat=1|S=1,Y=y)|
double eqodds_gap(std::span<const PredictionRecord> records);

// Conjunctive accuracy improvement:
//   lambda * (gap_b - gap_d) + (1 - lambda) * (acc_d - acc_b)
double cai(double lambda, const BaselineSummary& baseline,
           const DebiasedSummary& debiased);

// Full report; CAI fields are filled when `baseline` is given.
MetricsReport compute_metrics(std::span<const PredictionRecord> records,
                              const std::optional<BaselineSummary>& baseline);

// Individual typology angle in degrees, atan2(L - 50, b) * 180 / pi.
double ita(double lightness, double yellowness);
inline constexpr double kCelebaDarkSkinIta = 28.0;
inline constexpr double kEyepacsDarkSkinIta = 19.0;
// Binarised sensitive attribute: 1 (dark skin) when ita <= threshold.
int dark_skin_flag(double ita_degrees, double threshold);

// Prediction CSV with header columns y_hat, y, s (any order).
std::vector<PredictionRecord> load_predictions_csv(const std::string& path);

}  // namespace rfib

#endif  // RFIB_METRICS_HPP_
