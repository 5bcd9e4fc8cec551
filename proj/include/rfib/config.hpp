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

#ifndef RFIB_CONFIG_HPP_
#define RFIB_CONFIG_HPP_

#include <cstddef>
#include <string>

#include "rfib/divergences.hpp"

namespace rfib {

// One instance of the fair-bottleneck objective. beta1 weighs the label
// likelihood under Q(Y|Z), beta2 the likelihood under Q(Y|S,Z). The defaults
// describe the plain information-bottleneck baseline (alpha = 1, beta2 = 0).
struct RfibConfig {
  Alpha alpha{1.0};
  double beta1 = 1.0;
  double beta2 = 0.0;
  double gamma2 = 1.0;
  std::size_t d = 32;
  std::size_t mc_samples = 1;

  // Throws ConfigError when an invariant is broken.
  void validate() const;
};

// "IB" when alpha = 1 and beta2 = 0, "CFB" when alpha = 1 and beta1 = 0,
// "RFIB" otherwise.
std::string method_label(const RfibConfig& cfg);

}  // namespace rfib

#endif  // RFIB_CONFIG_HPP_
