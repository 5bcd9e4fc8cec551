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

// Model checkpoint, format tag "rfib-ckpt-v1": a JSON document holding the
// objective config, the architecture, the named-slice table, and the flat
// parameter vector as base64 of little-endian IEEE-754 doubles.

#ifndef RFIB_CHECKPOINT_HPP_
#define RFIB_CHECKPOINT_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfib/config.hpp"
#include "rfib/logistic.hpp"
#include "rfib/model.hpp"

namespace rfib {

inline constexpr const char* kCheckpointFormat = "rfib-ckpt-v1";

struct Checkpoint {
  RfibConfig config;
  ModelParams params;
  std::optional<LinearClassifier> classifier;
};

std::string base64_encode_doubles(std::span<const double> values);
std::vector<double> base64_decode_doubles(const std::string& text);

std::string checkpoint_to_string(const Checkpoint& ckpt);
// Throws FormatError on a wrong tag, slice table or payload length.
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace rfib

#endif  // RFIB_CHECKPOINT_HPP_
