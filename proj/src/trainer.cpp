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

#include "rfib/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "rfib/backprop.hpp"
#include "rfib/checkpoint.hpp"
#include "rfib/error.hpp"
#include "rfib/io.hpp"

namespace rfib {
namespace {

enum Stream : std::uint32_t {
  kSplitStream = 1,
  kInitStream = 2,
  kShuffleStream = 3,
  kNoiseStream = 4,
  kValNoiseStream = 5,
};

std::uint64_t sub_seed(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

std::size_t val_count(std::size_t n, double fraction) {
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

}  // namespace

void TrainSettings::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be > 0");
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  if (max_epochs == 0) throw ConfigError("max_epochs must be >= 1");
  if (patience == 0 || patience > max_epochs) {
    throw ConfigError("patience must lie in [1, max_epochs]");
  }
  if (!(min_delta >= 0.0)) throw ConfigError("min_delta must be >= 0");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("val_fraction must lie in (0, 1)");
  }
}

Adam::Adam(std::size_t size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw DimensionMismatch("Adam state size differs from parameter size");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

TrainValSplit split_train_val(const Dataset& data, double val_fraction,
                              std::uint64_t seed) {
  if (data.size() < 2) throw EmptyDataset("need >= 2 examples to split");
  std::mt19937_64 engine(sub_seed(seed, kSplitStream));
  std::array<std::vector<std::size_t>, 4> cells;
  for (std::size_t i = 0; i < data.size(); ++i) {
    cells[2 * data.y[i] + data.s[i]].push_back(i);
  }
  TrainValSplit split;
  split.stratified = std::all_of(cells.begin(), cells.end(), [](const auto& c) {
    return c.empty() || c.size() >= 5;
  });
  if (split.stratified) {
    for (auto& cell : cells) {
      if (cell.empty()) continue;
      std::shuffle(cell.begin(), cell.end(), engine);
      const std::size_t k = val_count(cell.size(), val_fraction);
      split.val.insert(split.val.end(), cell.begin(), cell.begin() + k);
      split.train.insert(split.train.end(), cell.begin() + k, cell.end());
    }
  } else {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), engine);
    const std::size_t k = val_count(all.size(), val_fraction);
    split.val.assign(all.begin(), all.begin() + k);
    split.train.assign(all.begin() + k, all.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  return split;
}

TrainResult train(const Dataset& data, const RfibConfig& cfg,
                  const TrainSettings& settings) {
  settings.validate();
  cfg.validate();
  if (data.size() == 0) throw EmptyDataset("training set is empty");
  data.validate();

  const TrainValSplit split = split_train_val(data, settings.val_fraction, settings.seed);
  const Dataset val = data.subset(split.val);
  std::vector<std::size_t> order = split.train;

  Architecture arch;
  arch.input_dim = data.features();
  arch.latent_dim = cfg.d;
  ModelParams params = ModelParams::initialize(arch, sub_seed(settings.seed, kInitStream));
  Adam adam(params.size(), settings.lr);
  std::mt19937_64 shuffle_engine(sub_seed(settings.seed, kShuffleStream));
  NoiseSource noise(sub_seed(settings.seed, kNoiseStream));
  NoiseSource val_noise(sub_seed(settings.seed, kValNoiseStream));

  TrainResult result;
  result.stratified = split.stratified;
  result.params = params;
  double best_val = 0.0;
  double reference = 0.0;
  std::size_t waited = 0;

  for (std::size_t epoch = 1; epoch <= settings.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_engine);
    double weighted_loss = 0.0;
    std::size_t seen = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size();
         start += settings.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + settings.batch_size);
      const Dataset batch = data.subset(
          std::span<const std::size_t>(order).subspan(start, end - start));
      LossAndGrad lg = backward(params, batch.x, batch.y, batch.s, cfg, noise);
      if (!std::isfinite(lg.loss.total) || !all_finite(lg.grad)) {
        throw NonFiniteLoss(epoch, batch_index);
      }
      adam.step(params.flat(), lg.grad);
      weighted_loss += lg.loss.total * static_cast<double>(batch.size());
      seen += batch.size();
    }

    val_noise.reset();
    const LossBreakdown v = forward_loss(params, val.x, val.y, val.s, cfg, val_noise);
    if (!std::isfinite(v.total)) throw NonFiniteLoss(epoch, batch_index);

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = weighted_loss / static_cast<double>(seen);
    entry.val_loss = v.total;
    entry.compression = v.compression;
    entry.utility_loglik = v.utility_loglik;
    entry.conditional_loglik = v.conditional_loglik;
    result.log.push_back(entry);
    result.final_epoch = epoch;

    if (epoch == 1 || v.total < best_val) {
      best_val = v.total;
      result.best_epoch = epoch;
      result.params = params;
    }
    if (epoch == 1 || v.total < reference - settings.min_delta) {
      reference = v.total;
      waited = 0;
    } else if (++waited >= settings.patience) {
      break;
    }
  }
  return result;
}

LinearClassifier fit_downstream(const Matrix& z_train,
                                std::span<const int> y_train) {
  return fit_logistic(z_train, y_train);
}

std::vector<PredictionRecord> predict_records(const ModelParams& params,
                                              const LinearClassifier& clf,
                                              const Dataset& test) {
  if (test.size() == 0) throw EmptyDataset("test set is empty");
  test.validate();
  const Matrix z = encode_mean(params, test.x);
  const std::vector<int> y_hat = clf.predict(z);
  std::vector<PredictionRecord> records(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    records[i] = {y_hat[i], test.y[i], test.s[i]};
  }
  return records;
}

MetricsReport evaluate(const ModelParams& params, const LinearClassifier& clf,
                       const Dataset& test,
                       const std::optional<BaselineSummary>& baseline) {
  return compute_metrics(predict_records(params, clf, test), baseline);
}

double head_f_accuracy(const ModelParams& params, const Dataset& test) {
  if (test.size() == 0) throw EmptyDataset("test set is empty");
  const std::vector<double> p = decode_y(params, encode_mean(params, test.x));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    correct += (p[i] > 0.5 ? 1 : 0) == test.y[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(p.size());
}

RunOutput run_experiment(const Dataset& train_data, const Dataset& test_data,
                         const RfibConfig& cfg, const TrainSettings& settings,
                         const std::optional<BaselineSummary>& baseline) {
  RunOutput out;
  out.training = train(train_data, cfg, settings);
  const Matrix z_train = encode_mean(out.training.params, train_data.x);
  out.classifier = fit_downstream(z_train, train_data.y);
  out.metrics = evaluate(out.training.params, out.classifier, test_data, baseline);
  out.head_f_acc = head_f_accuracy(out.training.params, test_data);
  return out;
}

std::vector<double> SweepGrid::linear(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("bad linear grid range");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = lo + static_cast<double>(k) * step;
  return out;
}

SweepGrid SweepGrid::defaults() {
  SweepGrid g;
  g.alphas = linear(0.0, 1.0, 0.25);
  g.beta1s = linear(1.0, 50.0, 7.0);
  g.beta2s = linear(1.0, 50.0, 7.0);
  return g;
}

void SweepGrid::validate() const {
  if (alphas.empty() || beta1s.empty() || beta2s.empty()) {
    throw ConfigError("sweep grid lists must be nonempty");
  }
  for (double a : alphas) Alpha{a};
  for (double b : beta1s)
    if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("beta1 values must be >= 0");
  for (double b : beta2s)
    if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("beta2 values must be >= 0");
}

std::vector<RunResult> sweep(const Dataset& train_data,
                             const Dataset& test_data,
                             const RfibConfig& base_cfg, const SweepGrid& grid,
                             const TrainSettings& settings,
                             const SweepOptions& options) {
  grid.validate();
  settings.validate();
  base_cfg.validate();

  std::vector<RfibConfig> configs;
  for (double a : grid.alphas) {
    for (double b1 : grid.beta1s) {
      for (double b2 : grid.beta2s) {
        RfibConfig cfg = base_cfg;
        cfg.alpha = Alpha(a);
        cfg.beta1 = b1;
        cfg.beta2 = b2;
        configs.push_back(cfg);
      }
    }
  }

  auto run_point = [&](const RfibConfig& cfg, const std::optional<BaselineSummary>& baseline,
                       const std::string& ckpt_name, RunResult& out) {
    out.config = cfg;
    try {
      RunOutput run = run_experiment(train_data, test_data, cfg, settings, baseline);
      out.metrics = run.metrics;
      out.final_epoch = run.training.final_epoch;
      if (!options.checkpoint_dir.empty()) {
        out.checkpoint_path = options.checkpoint_dir + "/" + ckpt_name;
        save_checkpoint(out.checkpoint_path,
                        Checkpoint{cfg, run.training.params, run.classifier});
      }
    } catch (const std::exception& e) {
      out.metrics.reset();
      out.error = e.what();
    }
  };

  std::vector<RunResult> results(configs.size());
  std::optional<BaselineSummary> baseline;
  std::optional<RunResult> baseline_row;
  if (grid.include_baseline) {
    RfibConfig ref = base_cfg;
    ref.alpha = Alpha(1.0);
    ref.beta2 = 0.0;
    RunResult row;
    row.is_baseline = true;
    run_point(ref, std::nullopt, "baseline.ckpt.json", row);
    if (row.metrics) {
      baseline = BaselineSummary{100.0 * row.metrics->acc, 100.0 * row.metrics->acc_gap};
      row.metrics->cai_05 = 0.0;
      row.metrics->cai_075 = 0.0;
    }
    baseline_row = row;
  }

  const long n = static_cast<long>(configs.size());
  const int jobs = std::max(options.jobs, 1);
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
  for (long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    results[idx].grid_index = idx;
    run_point(configs[idx], baseline, "point_" + std::to_string(idx) + ".ckpt.json",
              results[idx]);
  }

  if (baseline_row) results.insert(results.begin(), *baseline_row);
  const bool by_cai = baseline.has_value();
  std::stable_sort(results.begin(), results.end(), [&](const RunResult& a, const RunResult& b) {
    if (a.metrics.has_value() != b.metrics.has_value()) return a.metrics.has_value();
    if (!a.metrics) return false;
    const double ka = by_cai ? *a.metrics->cai_05 : a.metrics->acc;
    const double kb = by_cai ? *b.metrics->cai_05 : b.metrics->acc;
    return ka > kb;
  });
  return results;
}

std::string training_log_csv(const std::vector<EpochLog>& log) {
  std::string out = "epoch,train_loss,val_loss,compression,utility_loglik,conditional_loglik\n";
  for (const auto& e : log) {
    out += std::to_string(e.epoch) + "," + format_double(e.train_loss) + "," +
           format_double(e.val_loss) + "," + format_double(e.compression) + "," +
           format_double(e.utility_loglik) + "," +
           format_double(e.conditional_loglik) + "\n";
  }
  return out;
}

std::string sweep_table_csv(const std::vector<RunResult>& results) {
  std::string out =
      "grid_index,is_baseline,method,alpha,beta1,beta2,gamma2,d,mc_samples,"
      "final_epoch,acc,acc_gap,acc_min,acc_min_group,dp_gap,eqodds_gap,cai_05,"
      "cai_075,checkpoint,error\n";
  auto pct = [](double v) { return format_double(100.0 * v); };
  for (const auto& r : results) {
    std::string error = r.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    out += (r.is_baseline ? std::string("-") : std::to_string(r.grid_index)) + "," +
           (r.is_baseline ? "1" : "0") + "," +
           (r.is_baseline ? std::string("baseline") : method_label(r.config)) + "," +
           format_double(r.config.alpha.value()) + "," + format_double(r.config.beta1) +
           "," + format_double(r.config.beta2) + "," + format_double(r.config.gamma2) +
           "," + std::to_string(r.config.d) + "," + std::to_string(r.config.mc_samples) +
           "," + std::to_string(r.final_epoch) + ",";
    if (r.metrics) {
      const auto& m = *r.metrics;
      out += pct(m.acc) + "," + pct(m.acc_gap) + "," + pct(m.acc_min) + "," +
             std::to_string(m.acc_min_group) + "," + pct(m.dp_gap) + "," +
             pct(m.eqodds_gap) + "," + (m.cai_05 ? format_double(*m.cai_05) : "") +
             "," + (m.cai_075 ? format_double(*m.cai_075) : "") + ",";
    } else {
      out += ",,,,,,,,";
    }
    out += r.checkpoint_path + "," + error + "\n";
  }
  return out;
}

}  // namespace rfib
