// Copyright 2026 The rsvqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RSVQA_CONFIG_HPP_
#define RSVQA_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "rsvqa/losses.hpp"
#include "rsvqa/model.hpp"

namespace rsvqa {

enum class TrainMode { kBaseline, kContrastive };

std::string_view to_string(TrainMode mode);
std::string_view to_string(NegativeScheme scheme);
TrainMode parse_train_mode(std::string_view text);            // UsageError
NegativeScheme parse_negative_scheme(std::string_view text);  // UsageError

struct TrainConfig {
  double learning_rate = 1e-5;
  int batch_size = 280;
  int epochs = 150;
  double margin = 1.0;
  TrainMode mode = TrainMode::kContrastive;
  std::uint64_t seed = 42;
  NegativeScheme negative_scheme = NegativeScheme::kReverse;
  // max_question_len lives in dims; vocab_size and num_answers are derived.
  ModelDims dims;

  // Adam moments; not configurable from files.
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  // Optimizer settings reported for the original large-scale runs.
  static TrainConfig paper_profile();
  // Small batch, few epochs and a larger step size for CPU-scale runs.
  static TrainConfig desk_profile();

  void validate() const;

  // Flat "key = value" text. Every key except dims.* is required; unknown or
  // repeated keys are rejected. Throws UsageError listing offending keys.
  static TrainConfig parse(std::string_view text);
  static TrainConfig load(const std::filesystem::path& path);
  std::string to_text() const;

  // Applies one key=value assignment (same keys as the file format).
  void set(std::string_view key, std::string_view value);

  bool operator==(const TrainConfig&) const = default;
};

}  // namespace rsvqa

#endif  // RSVQA_CONFIG_HPP_
