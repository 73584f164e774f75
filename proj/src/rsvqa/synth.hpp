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

#ifndef RSVQA_SYNTH_HPP_
#define RSVQA_SYNTH_HPP_

// Deterministic shape-scene corpus with templated questions in the four
// question categories, plus rule-based paraphrases.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rsvqa/corpus.hpp"
#include "rsvqa/image_io.hpp"
#include "rsvqa/translator.hpp"

namespace rsvqa::synth {

enum class Shape { kCircle, kSquare };
enum class Colour { kRed, kBlue };

inline constexpr int kNumClasses = 4;  // colour x shape
inline constexpr int kShapeSize = 5;   // bounding box side in pixels
inline constexpr int kAnswerCount = 9; // yes, no, 0-4, rural, urban

// Class index = colour * 2 + shape.
int class_index(Colour colour, Shape shape);
std::string class_phrase(int cls, bool plural);  // "red circle(s)"

struct SynthConfig {
  int n_images = 200;
  int image_size = 32;
  std::uint64_t seed = 42;
  int max_per_class = 4;
  int urban_threshold = 8;  // total shapes at or above this -> "urban"
  int placement_attempts = 200;
};

struct PlacedShape {
  int cls = 0;
  int x = 0;  // top-left corner of the bounding box
  int y = 0;
};

struct SceneRecord {
  std::int64_t image_id = 0;
  std::vector<PlacedShape> shapes;
  std::array<int, kNumClasses> counts{};
  int dropped = 0;  // shapes that could not be placed without overlap
};

struct SynthResult {
  VQACorpus corpus;  // originals only, root unset
  std::vector<SceneRecord> scenes;
  std::vector<Image> images;  // parallel to corpus.images
};

SynthResult generate(const SynthConfig& config);

Image render_scene(const SceneRecord& scene, int image_size, std::uint64_t seed);

// "train" rules paraphrase train/val questions; "heldout" rules are reserved
// for the test split so paraphrased test questions use unseen templates.
struct ParaphraseRules {
  RuleTable train_rules;
  RuleTable heldout_rules;

  static ParaphraseRules parse(std::string_view text);
  static const ParaphraseRules& shipped();
};

// Every matching rule of `table` yields one rewrite; non-matching rules are
// skipped. Results equal (after normalization) to the input are omitted.
std::vector<std::string> paraphrase_text(const std::string& text, const RuleTable& table);

// Attaches rule paraphrases to every original; pivots cycle zh, de, fr over
// the emitted paraphrases. New ids start after the largest existing id.
VQACorpus rule_paraphrase(const VQACorpus& corpus,
                          const ParaphraseRules& rules = ParaphraseRules::shipped());

// Writes images/NNNN.png and corpus.json under `dir`; returns the corpus with
// root set to `dir`.
VQACorpus write_corpus(const SynthResult& result, const VQACorpus& corpus,
                       const std::filesystem::path& dir);

}  // namespace rsvqa::synth

#endif  // RSVQA_SYNTH_HPP_
