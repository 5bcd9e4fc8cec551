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

// Training loop (Adam on the batch objective, validation split, early
// stopping), downstream logistic regression on frozen mean embeddings,
// evaluation, and hyperparameter sweeps.

#ifndef RFIB_TRAINER_HPP_
#define RFIB_TRAINER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfib/config.hpp"
#include "rfib/datasets.hpp"
#include "rfib/logistic.hpp"
#include "rfib/metrics.hpp"
#include "rfib/model.hpp"

namespace rfib {

struct TrainSettings {
  double lr = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 20;
  std::size_t patience = 5;
  double min_delta = 0.0;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

class Adam {
 public:
  Adam(std::size_t size, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void step(std::span<double> params, std::span<const double> grad);
  std::uint64_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

// Validation-set breakdown reported per epoch.
struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double compression = 0.0;
  double utility_loglik = 0.0;
  double conditional_loglik = 0.0;
};

struct TrainResult {
  ModelParams params;  // from the epoch with the lowest validation loss
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  std::size_t final_epoch = 0;
  bool stratified = false;
};

struct TrainValSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  bool stratified = false;
};

// Stratified by (y, s) when every nonempty cell holds >= 5 examples,
// otherwise a plain seeded random split.
TrainValSplit split_train_val(const Dataset& data, double val_fraction,
                              std::uint64_t seed);

TrainResult train(const Dataset& data, const RfibConfig& cfg,
                  const TrainSettings& settings);

LinearClassifier fit_downstream(const Matrix& z_train,
                                std::span<const int> y_train);

// Predictions of the downstream classifier on the mean embedding of `test`.
std::vector<PredictionRecord> predict_records(const ModelParams& params,
                                              const LinearClassifier& clf,
                                              const Dataset& test);
MetricsReport evaluate(const ModelParams& params, const LinearClassifier& clf,
                       const Dataset& test,
                       const std::optional<BaselineSummary>& baseline = {});

// Accuracy of thresholding head f at 0.5 on the mean embedding; logged for
// reference only, metrics are scored from the downstream classifier.
double head_f_accuracy(const ModelParams& params, const Dataset& test);

// train -> fit_downstream (on the full training set) -> evaluate.
struct RunOutput {
  TrainResult training;
  LinearClassifier classifier;
  MetricsReport metrics;
  double head_f_acc = 0.0;
};
RunOutput run_experiment(const Dataset& train_data, const Dataset& test_data,
                         const RfibConfig& cfg, const TrainSettings& settings,
                         const std::optional<BaselineSummary>& baseline = {});

struct SweepGrid {
  std::vector<double> alphas;
  std::vector<double> beta1s;
  std::vector<double> beta2s;
  // Adds an IB reference run (alpha = 1, beta2 = 0, beta1 from the base
  // config) and scores CAI against it.
  bool include_baseline = false;

  // {lo, lo + step, ...} up to and including hi (within 1e-9).
  static std::vector<double> linear(double lo, double hi, double step);
  static SweepGrid defaults();
  void validate() const;
  std::size_t points() const {
    return alphas.size() * beta1s.size() * beta2s.size();
  }
};

struct RunResult {
  RfibConfig config;
  std::optional<MetricsReport> metrics;
  std::size_t final_epoch = 0;
  std::string checkpoint_path;
  std::string error;
  bool is_baseline = false;
  std::size_t grid_index = 0;
};

struct SweepOptions {
  int jobs = 1;
  std::string checkpoint_dir;  // empty: no checkpoints written
};

// One run per grid point, all with settings.seed so a point's result does
// not depend on which other points are present. Sorted by CAI_0.5 (with a
// baseline) or accuracy (without), descending; failed points last.
std::vector<RunResult> sweep(const Dataset& train_data,
                             const Dataset& test_data,
                             const RfibConfig& base_cfg, const SweepGrid& grid,
                             const TrainSettings& settings,
                             const SweepOptions& options = {});

std::string training_log_csv(const std::vector<EpochLog>& log);
std::string sweep_table_csv(const std::vector<RunResult>& results);

}  // namespace rfib

#endif  // RFIB_TRAINER_HPP_
