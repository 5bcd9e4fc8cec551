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

#include "rfib/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>

#include "json.hpp"
#include "rfib/error.hpp"
#include "rfib/io.hpp"
#include "rfib/json_io.hpp"

namespace rfib {
namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

std::string base64_encode_doubles(std::span<const double> values) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    const std::size_t left = bytes.size() - i;
    std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
    if (left > 1) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (left > 2) chunk |= bytes[i + 2];
    out += kAlphabet[(chunk >> 18) & 63];
    out += kAlphabet[(chunk >> 12) & 63];
    out += left > 1 ? kAlphabet[(chunk >> 6) & 63] : '=';
    out += left > 2 ? kAlphabet[chunk & 63] : '=';
  }
  return out;
}

std::vector<double> base64_decode_doubles(const std::string& text) {
  if (text.size() % 4 != 0) throw FormatError("base64 length not a multiple of 4");
  std::vector<std::uint8_t> bytes;
  bytes.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t chunk = 0;
    int pad = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      int v = 0;
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) throw FormatError("misplaced base64 padding");
        ++pad;
      } else {
        if (pad > 0) throw FormatError("misplaced base64 padding");
        v = decode_char(c);
        if (v < 0) throw FormatError("invalid base64 character");
      }
      chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
    }
    bytes.push_back(static_cast<std::uint8_t>(chunk >> 16));
    if (pad < 2) bytes.push_back(static_cast<std::uint8_t>(chunk >> 8));
    if (pad < 1) bytes.push_back(static_cast<std::uint8_t>(chunk));
  }
  if (bytes.size() % 8 != 0) throw FormatError("payload is not a whole number of doubles");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[8 * i + b]) << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  const Architecture& arch = ckpt.params.arch();
  nlohmann::json j;
  j["format"] = kCheckpointFormat;
  j["config"] = to_json(ckpt.config);
  j["architecture"] = {{"input_dim", arch.input_dim},
                       {"latent_dim", arch.latent_dim},
                       {"encoder_hidden", arch.encoder_hidden},
                       {"head_hidden", arch.head_hidden}};
  nlohmann::json slices = nlohmann::json::array();
  for (const auto& s : ckpt.params.slices()) {
    slices.push_back({{"name", s.name},
                      {"offset", s.offset},
                      {"rows", s.rows},
                      {"cols", s.cols}});
  }
  j["slices"] = slices;
  j["params"] = base64_encode_doubles(ckpt.params.flat());
  if (ckpt.classifier) {
    j["classifier"] = {{"weights", base64_encode_doubles(ckpt.classifier->weights)},
                       {"bias", base64_encode_doubles(std::span<const double>(&ckpt.classifier->bias, 1))}};
  }
  return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", std::string()) != kCheckpointFormat) {
    throw FormatError(std::string("checkpoint format tag is not ") + kCheckpointFormat);
  }
  Checkpoint ckpt;
  try {
    ckpt.config = rfib_config_from_json(j.at("config"));
    const auto& a = j.at("architecture");
    Architecture arch;
    arch.input_dim = a.at("input_dim").get<std::size_t>();
    arch.latent_dim = a.at("latent_dim").get<std::size_t>();
    arch.encoder_hidden = a.at("encoder_hidden").get<std::size_t>();
    arch.head_hidden = a.at("head_hidden").get<std::size_t>();
    ckpt.params = ModelParams::from_flat(
        arch, base64_decode_doubles(j.at("params").get<std::string>()));
    const auto& stored = j.at("slices");
    const auto& expected = ckpt.params.slices();
    if (!stored.is_array() || stored.size() != expected.size()) {
      throw FormatError("slice table does not match the architecture");
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const auto& s = stored[i];
      if (s.at("name").get<std::string>() != expected[i].name ||
          s.at("offset").get<std::size_t>() != expected[i].offset ||
          s.at("rows").get<std::size_t>() != expected[i].rows ||
          s.at("cols").get<std::size_t>() != expected[i].cols) {
        throw FormatError("slice '" + expected[i].name + "' does not match");
      }
    }
    if (ckpt.config.d != arch.latent_dim) {
      throw FormatError("config d differs from the stored latent dimension");
    }
    if (j.contains("classifier")) {
      const auto& c = j.at("classifier");
      LinearClassifier clf;
      clf.weights = base64_decode_doubles(c.at("weights").get<std::string>());
      const auto bias = base64_decode_doubles(c.at("bias").get<std::string>());
      if (bias.size() != 1 || clf.weights.size() != arch.latent_dim) {
        throw FormatError("classifier shape does not match the latent dimension");
      }
      clf.bias = bias[0];
      ckpt.classifier = clf;
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("invalid checkpoint: ") + e.what());
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  write_file_atomic(path, checkpoint_to_string(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_string(read_file(path));
}

}  // namespace rfib
