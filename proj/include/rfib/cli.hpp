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

// Command-line front end. Each command returns a process exit code:
// 0 success, 2 config/validity, 3 I/O or format, 4 numerical failure,
// 5 evaluation precondition.

#ifndef RFIB_CLI_HPP_
#define RFIB_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rfib/config.hpp"
#include "rfib/datasets.hpp"
#include "rfib/trainer.hpp"

namespace rfib::cli {

inline constexpr const char* kMetricsFormat = "rfib-metrics-v1";

// Parsed config file: sections "data", "model", "train", "sweep" (optional).
// The data section holds either {"train_csv", "test_csv"} (paths relative to
// the config file) or {"synthetic": <spec>}.
struct ConfigFile {
  std::optional<SyntheticSpec> synthetic;
  std::string train_csv;
  std::string test_csv;
  RfibConfig model;
  TrainSettings train;
  std::optional<SweepGrid> sweep;
};

ConfigFile parse_config(const nlohmann::json& j, const std::string& base_dir);
ConfigFile load_config(const std::string& path);
// Materialises the train/test datasets described by the data section.
SplitData load_data(const ConfigFile& cfg);

struct CommonOptions {
  std::string out_dir;  // empty: $RFIB_OUT_DIR, then "rfib_out"
  std::optional<std::uint64_t> seed;
};

std::string resolve_out_dir(const std::string& flag);

int cmd_gen_data(const std::string& spec_path, const CommonOptions& common,
                 std::ostream& out, std::ostream& err);
int cmd_train(const std::string& config_path, const CommonOptions& common,
              std::ostream& out, std::ostream& err);
int cmd_sweep(const std::string& config_path, const CommonOptions& common,
              int jobs, std::ostream& out, std::ostream& err);
int cmd_divergence(const std::vector<double>& mu,
                   const std::vector<double>& var, double gamma2, double alpha,
                   bool oracle, std::ostream& out, std::ostream& err);
int cmd_embed(const std::string& checkpoint_path, const std::string& data_path,
              const std::string& out_path, std::ostream& out,
              std::ostream& err);
int cmd_audit(const std::string& predictions_path,
              std::optional<double> baseline_acc,
              std::optional<double> baseline_gap, std::ostream& out,
              std::ostream& err);

// Full argv dispatch (subcommands gen-data, train, sweep, divergence, embed,
// audit).
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace rfib::cli

#endif  // RFIB_CLI_HPP_
