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

#include "rfib/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "rfib/checkpoint.hpp"
#include "rfib/divergences.hpp"
#include "rfib/error.hpp"
#include "rfib/io.hpp"
#include "rfib/json_io.hpp"
#include "rfib/metrics.hpp"
#include "rfib/model.hpp"

namespace rfib::cli {
namespace {

namespace fs = std::filesystem;

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

nlohmann::json parse_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + " is not valid JSON: " + e.what());
  }
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// Runs `body`, mapping library errors to exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ValidityViolation& e) {
    err << "error: " << e.what() << "\n"
        << "bound alpha*gamma2/(alpha-1) = " << fmt12(e.bound()) << "\n";
    return e.exit_code();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

void print_cells(std::ostream& out, const char* name, const Dataset& d) {
  out << name << ": n=" << d.size();
  for (int y = 0; y < 2; ++y)
    for (int s = 0; s < 2; ++s)
      out << " (y=" << y << ",s=" << s << ")=" << d.cell_count(y, s);
  out << "\n";
}

nlohmann::json metrics_document(const ConfigFile& cfg, const Dataset& train_data,
                                const RunOutput& run) {
  nlohmann::json j;
  j["format"] = kMetricsFormat;
  j["method"] = method_label(cfg.model);
  j["config"] = to_json(cfg.model);
  j["train"] = to_json(cfg.train);
  j["data"] = train_data.provenance;
  j["final_epoch"] = run.training.final_epoch;
  j["best_epoch"] = run.training.best_epoch;
  j["head_f_acc"] = 100.0 * run.head_f_acc;
  j["metrics"] = to_json(run.metrics);
  return j;
}

}  // namespace

ConfigFile parse_config(const nlohmann::json& j, const std::string& base_dir) {
  detail::reject_unknown_keys(j, {"data", "model", "train", "sweep"}, "root");
  ConfigFile cfg;
  if (!j.contains("data")) throw ConfigError("missing section 'data'");
  const auto& data = j.at("data");
  detail::reject_unknown_keys(data, {"synthetic", "train_csv", "test_csv"}, "data");
  if (data.contains("synthetic")) {
    if (data.contains("train_csv") || data.contains("test_csv")) {
      throw ConfigError("section 'data' takes either 'synthetic' or CSV paths");
    }
    cfg.synthetic = synthetic_spec_from_json(data.at("synthetic"));
  } else {
    if (!data.contains("train_csv") || !data.contains("test_csv")) {
      throw ConfigError("section 'data' needs 'train_csv' and 'test_csv'");
    }
    auto path = [&](const char* key) {
      if (!data.at(key).is_string()) {
        throw ConfigError(std::string("key '") + key + "' must be a string");
      }
      fs::path p(data.at(key).get<std::string>());
      if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
      return p.string();
    };
    cfg.train_csv = path("train_csv");
    cfg.test_csv = path("test_csv");
  }
  cfg.model = rfib_config_from_json(j.value("model", nlohmann::json::object()));
  cfg.train = train_settings_from_json(j.value("train", nlohmann::json::object()));
  if (j.contains("sweep")) cfg.sweep = sweep_grid_from_json(j.at("sweep"));
  return cfg;
}

ConfigFile load_config(const std::string& path) {
  return parse_config(parse_json_file(path), fs::path(path).parent_path().string());
}

SplitData load_data(const ConfigFile& cfg) {
  if (cfg.synthetic) {
    return missing_subgroup_split(*cfg.synthetic, cfg.synthetic->held_out_cell);
  }
  return {load_csv(cfg.train_csv), load_csv(cfg.test_csv)};
}

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("RFIB_OUT_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return "rfib_out";
}

int cmd_gen_data(const std::string& spec_path, const CommonOptions& common,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SyntheticSpec spec = SyntheticSpec::defaults();
    if (!spec_path.empty()) {
      nlohmann::json j;
      try {
        j = parse_json_file(spec_path);
      } catch (const ConfigError& e) {
        throw InvalidSpec(e.what());
      }
      spec = synthetic_spec_from_json(j);
    }
    if (common.seed) spec.seed = *common.seed;
    const SplitData split = missing_subgroup_split(spec, spec.held_out_cell);
    const std::string dir = resolve_out_dir(common.out_dir);
    write_csv(split.train, join(dir, "train.csv"));
    write_csv(split.test, join(dir, "test.csv"));
    print_cells(out, "train", split.train);
    print_cells(out, "test", split.test);
    return 0;
  });
}

int cmd_train(const std::string& config_path, const CommonOptions& common,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ConfigFile cfg = load_config(config_path);
    if (common.seed) cfg.train.seed = *common.seed;
    const SplitData data = load_data(cfg);
    const RunOutput run = run_experiment(data.train, data.test, cfg.model, cfg.train);

    const std::string dir = resolve_out_dir(common.out_dir);
    save_checkpoint(join(dir, "checkpoint.json"),
                    Checkpoint{cfg.model, run.training.params, run.classifier});
    write_file_atomic(join(dir, "train_log.csv"), training_log_csv(run.training.log));
    write_file_atomic(join(dir, "metrics.json"),
                      metrics_document(cfg, data.train, run).dump(2) + "\n");
    out << method_label(cfg.model) << ": acc=" << fmt12(100.0 * run.metrics.acc)
        << " acc_gap=" << fmt12(100.0 * run.metrics.acc_gap)
        << " dp_gap=" << fmt12(100.0 * run.metrics.dp_gap)
        << " eqodds_gap=" << fmt12(100.0 * run.metrics.eqodds_gap)
        << " epochs=" << run.training.final_epoch << "\n";
    return 0;
  });
}

int cmd_sweep(const std::string& config_path, const CommonOptions& common,
              int jobs, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ConfigFile cfg = load_config(config_path);
    if (common.seed) cfg.train.seed = *common.seed;
    const SweepGrid grid = cfg.sweep.value_or(SweepGrid::defaults());
    const SplitData data = load_data(cfg);
    const std::string dir = resolve_out_dir(common.out_dir);
    SweepOptions options;
    options.jobs = jobs;
    options.checkpoint_dir = join(dir, "checkpoints");
    const auto results = sweep(data.train, data.test, cfg.model, grid, cfg.train, options);
    write_file_atomic(join(dir, "sweep.csv"), sweep_table_csv(results));

    std::size_t ok = 0;
    for (const auto& r : results) {
      if (r.metrics && !r.is_baseline) ++ok;
      if (!r.error.empty()) err << "point " << r.grid_index << " failed: " << r.error << "\n";
    }
    out << ok << " of " << grid.points() << " grid points succeeded\n";
    return ok > 0 ? 0 : 4;
  });
}

int cmd_divergence(const std::vector<double>& mu, const std::vector<double>& var,
                   double gamma2, double alpha, bool oracle, std::ostream& out,
                   std::ostream& err) {
  return guarded(err, [&] {
    const DiagGaussian p{mu, var};
    const SphericalPrior q{gamma2, mu.size()};
    const Alpha a(alpha);
    const double value = renyi_div(p, q, a);
    out << "renyi_div " << fmt12(value) << "\n";
    if (oracle) {
      const double numeric = renyi_div_oracle(p, q, a);
      out << "oracle " << fmt12(numeric) << "\n";
      out << "abs_diff " << fmt12(std::abs(numeric - value)) << "\n";
    }
    return 0;
  });
}

int cmd_embed(const std::string& checkpoint_path, const std::string& data_path,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const Dataset data = load_csv(data_path);
    if (data.features() != ckpt.params.arch().input_dim) {
      throw FormatError("data has " + std::to_string(data.features()) +
                        " features, checkpoint expects " +
                        std::to_string(ckpt.params.arch().input_dim));
    }
    const Matrix z = encode_mean(ckpt.params, data.x);
    std::string text;
    for (std::size_t j = 0; j < z.cols(); ++j) text += "z" + std::to_string(j) + ",";
    text += "y,s\n";
    for (std::size_t i = 0; i < z.rows(); ++i) {
      for (double v : z.row(i)) text += format_double(v) + ",";
      text += std::to_string(data.y[i]) + "," + std::to_string(data.s[i]) + "\n";
    }
    write_file_atomic(out_path, text);
    out << "wrote " << z.rows() << " x " << z.cols() + 2 << " embedding to " << out_path
        << "\n";
    return 0;
  });
}

int cmd_audit(const std::string& predictions_path, std::optional<double> baseline_acc,
              std::optional<double> baseline_gap, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (baseline_acc.has_value() != baseline_gap.has_value()) {
      throw ConfigError("--baseline-acc and --baseline-gap go together");
    }
    const auto records = load_predictions_csv(predictions_path);
    std::optional<BaselineSummary> baseline;
    if (baseline_acc) baseline = BaselineSummary{*baseline_acc, *baseline_gap};
    nlohmann::json j;
    j["format"] = kMetricsFormat;
    j["records"] = records.size();
    j["metrics"] = to_json(compute_metrics(records, baseline));
    out << j.dump(2) << "\n";
    return 0;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Renyi fair information bottleneck: train, sweep and audit"};
  app.require_subcommand(1);

  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string config_path;
  int jobs = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out-dir", out_dir, "Output directory (default $RFIB_OUT_DIR or rfib_out)");
    cmd->add_option("--seed", seed, "Override the seed from the file");
  };

  std::string spec_path;
  auto* gen = app.add_subcommand("gen-data", "Write synthetic train.csv / test.csv");
  gen->add_option("--spec,--config", spec_path, "Synthetic spec JSON (defaults if omitted)");
  add_common(gen);

  auto* train_cmd = app.add_subcommand("train", "Train, fit the downstream classifier, evaluate");
  train_cmd->add_option("--config", config_path, "Config JSON")->required();
  add_common(train_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Hyperparameter sweep");
  sweep_cmd->add_option("--config", config_path, "Config JSON")->required();
  sweep_cmd->add_option("--jobs", jobs, "Grid points run in parallel")->check(CLI::PositiveNumber);
  add_common(sweep_cmd);

  std::vector<double> mu;
  std::vector<double> var;
  double gamma2 = 1.0;
  double alpha = 1.0;
  bool oracle = false;
  auto* div = app.add_subcommand("divergence", "Closed-form Renyi divergence to N(0, gamma2 I)");
  div->add_option("--mu", mu, "Mean vector, comma separated")->required()->delimiter(',');
  div->add_option("--var", var, "Variance vector, comma separated")->required()->delimiter(',');
  div->add_option("--gamma2", gamma2, "Prior variance");
  div->add_option("--alpha", alpha, "Renyi order")->required();
  div->add_flag("--oracle", oracle, "Also print the quadrature value and the difference");

  std::string ckpt_path;
  std::string data_path;
  std::string out_path;
  auto* embed = app.add_subcommand("embed", "Export mean embeddings with y, s columns");
  embed->add_option("--checkpoint", ckpt_path)->required();
  embed->add_option("--data", data_path)->required();
  embed->add_option("--out", out_path)->required();

  std::string predictions;
  std::optional<double> base_acc;
  std::optional<double> base_gap;
  auto* audit = app.add_subcommand("audit", "Fairness metrics for a y_hat,y,s prediction CSV");
  audit->add_option("--predictions", predictions)->required();
  audit->add_option("--baseline-acc", base_acc, "Baseline accuracy in percent");
  audit->add_option("--baseline-gap", base_gap, "Baseline accuracy gap in percent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const CommonOptions common{out_dir, seed};
  if (*gen) return cmd_gen_data(spec_path, common, out, err);
  if (*train_cmd) return cmd_train(config_path, common, out, err);
  if (*sweep_cmd) return cmd_sweep(config_path, common, jobs, out, err);
  if (*div) return cmd_divergence(mu, var, gamma2, alpha, oracle, out, err);
  if (*embed) return cmd_embed(ckpt_path, data_path, out_path, out, err);
  return cmd_audit(predictions, base_acc, base_gap, out, err);
}

}  // namespace rfib::cli
