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

// JSON views of the configuration and report types. Readers fill missing
// keys with defaults, reject unknown keys (ConfigError naming the key), and
// revalidate the type's invariants.

#ifndef RFIB_JSON_IO_HPP_
#define RFIB_JSON_IO_HPP_

#include <string>

#include "json.hpp"
#include "rfib/config.hpp"
#include "rfib/metrics.hpp"
#include "rfib/trainer.hpp"

namespace rfib {

nlohmann::json to_json(const RfibConfig& cfg);
RfibConfig rfib_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrainSettings& settings);
TrainSettings train_settings_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SweepGrid& grid);
SweepGrid sweep_grid_from_json(const nlohmann::json& j);

// Rates in percent (two decimals are not applied; values are exact).
nlohmann::json to_json(const MetricsReport& m);

namespace detail {
// Throws ConfigError when `j` is not an object or has a key outside `allowed`.
void reject_unknown_keys(const nlohmann::json& j,
                         std::initializer_list<const char*> allowed,
                         const std::string& section);
}  // namespace detail

}  // namespace rfib

#endif  // RFIB_JSON_IO_HPP_
