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

#include "rfib/json_io.hpp"

#include <algorithm>
#include <cstring>

#include "rfib/error.hpp"

namespace rfib {
namespace detail {

void reject_unknown_keys(const nlohmann::json& j,
                         std::initializer_list<const char*> allowed,
                         const std::string& section) {
  if (!j.is_object()) {
    throw ConfigError("section '" + section + "' must be a JSON object");
  }
  for (const auto& [key, _] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return key == k; });
    if (!known) {
      throw ConfigError("unknown key '" + key + "' in section '" + section +
                        "'");
    }
  }
}

}  // namespace detail

namespace {

template <typename T>
T read(const nlohmann::json& j, const char* key, T fallback,
       const std::string& section) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' in section '" + section +
                      "' has the wrong type");
  }
}

}  // namespace

nlohmann::json to_json(const RfibConfig& cfg) {
  return {{"alpha", cfg.alpha.value()}, {"beta1", cfg.beta1},
          {"beta2", cfg.beta2},         {"gamma2", cfg.gamma2},
          {"d", cfg.d},                 {"mc_samples", cfg.mc_samples}};
}

RfibConfig rfib_config_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(
      j, {"alpha", "beta1", "beta2", "gamma2", "d", "mc_samples"}, "model");
  RfibConfig cfg;
  cfg.alpha = Alpha(read(j, "alpha", cfg.alpha.value(), "model"));
  cfg.beta1 = read(j, "beta1", cfg.beta1, "model");
  cfg.beta2 = read(j, "beta2", cfg.beta2, "model");
  cfg.gamma2 = read(j, "gamma2", cfg.gamma2, "model");
  cfg.d = read(j, "d", cfg.d, "model");
  cfg.mc_samples = read(j, "mc_samples", cfg.mc_samples, "model");
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const TrainSettings& s) {
  return {{"lr", s.lr},
          {"batch_size", s.batch_size},
          {"max_epochs", s.max_epochs},
          {"patience", s.patience},
          {"min_delta", s.min_delta},
          {"val_fraction", s.val_fraction},
          {"seed", s.seed}};
}

TrainSettings train_settings_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j,
                              {"lr", "batch_size", "max_epochs", "patience",
                               "min_delta", "val_fraction", "seed"},
                              "train");
  TrainSettings s;
  s.lr = read(j, "lr", s.lr, "train");
  s.batch_size = read(j, "batch_size", s.batch_size, "train");
  s.max_epochs = read(j, "max_epochs", s.max_epochs, "train");
  s.patience = read(j, "patience", s.patience, "train");
  s.min_delta = read(j, "min_delta", s.min_delta, "train");
  s.val_fraction = read(j, "val_fraction", s.val_fraction, "train");
  s.seed = read(j, "seed", s.seed, "train");
  s.validate();
  return s;
}

nlohmann::json to_json(const SweepGrid& g) {
  return {{"alphas", g.alphas},
          {"beta1s", g.beta1s},
          {"beta2s", g.beta2s},
          {"include_baseline", g.include_baseline}};
}

SweepGrid sweep_grid_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(
      j, {"alphas", "beta1s", "beta2s", "include_baseline"}, "sweep");
  SweepGrid g = SweepGrid::defaults();
  g.alphas = read(j, "alphas", g.alphas, "sweep");
  g.beta1s = read(j, "beta1s", g.beta1s, "sweep");
  g.beta2s = read(j, "beta2s", g.beta2s, "sweep");
  g.include_baseline = read(j, "include_baseline", g.include_baseline, "sweep");
  g.validate();
  return g;
}

nlohmann::json to_json(const MetricsReport& m) {
  nlohmann::json j = {{"acc", 100.0 * m.acc},
                      {"acc_gap", 100.0 * m.acc_gap},
                      {"acc_min", 100.0 * m.acc_min},
                      {"acc_min_group", m.acc_min_group},
                      {"dp_gap", 100.0 * m.dp_gap},
                      {"eqodds_gap", 100.0 * m.eqodds_gap}};
  j["cai_05"] = m.cai_05 ? nlohmann::json(*m.cai_05) : nlohmann::json(nullptr);
  j["cai_075"] =
      m.cai_075 ? nlohmann::json(*m.cai_075) : nlohmann::json(nullptr);
  return j;
}

}  // namespace rfib
