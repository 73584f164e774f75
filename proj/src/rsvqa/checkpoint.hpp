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

#ifndef RSVQA_CHECKPOINT_HPP_
#define RSVQA_CHECKPOINT_HPP_

#include <filesystem>
#include <map>
#include <string>

#include "rsvqa/model.hpp"

namespace rsvqa {

// A trained model plus free-form provenance (mode, selected epoch, ...).
struct Checkpoint {
  Model model;
  std::map<std::string, std::string> info;
};

// JSON container: dims, both vocabularies, info, and each parameter as
// {"shape": [rows, cols], "data": [row-major values]}.
std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(std::string_view text);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// One "key rows x cols" line per parameter plus a dims summary.
std::string inspect_checkpoint(const Checkpoint& checkpoint);

}  // namespace rsvqa

#endif  // RSVQA_CHECKPOINT_HPP_
