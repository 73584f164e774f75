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

#include "rsvqa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include "rsvqa/embedded_data.hpp"
#include "rsvqa/errors.hpp"
#include "rsvqa/text.hpp"

namespace rsvqa::synth {
namespace {

constexpr double kBackground[3] = {0.25, 0.45, 0.25};
constexpr double kColours[2][3] = {{0.9, 0.1, 0.1}, {0.1, 0.2, 0.9}};

bool overlaps(const PlacedShape& a, const PlacedShape& b) {
  // Bounding boxes plus a one-pixel gap.
  constexpr int span = kShapeSize + 1;
  return a.x < b.x + span && b.x < a.x + span && a.y < b.y + span && b.y < a.y + span;
}

bool covers(int cls, int dx, int dy) {
  if (cls % 2 == static_cast<int>(Shape::kSquare)) return true;
  const double cx = dx - 2.0, cy = dy - 2.0;
  return cx * cx + cy * cy <= 6.25;
}

}  // namespace

int class_index(Colour colour, Shape shape) {
  return static_cast<int>(colour) * 2 + static_cast<int>(shape);
}

std::string class_phrase(int cls, bool plural) {
  std::string out = (cls / 2 == static_cast<int>(Colour::kRed)) ? "red " : "blue ";
  out += (cls % 2 == static_cast<int>(Shape::kCircle)) ? "circle" : "square";
  if (plural) out += 's';
  return out;
}

Image render_scene(const SceneRecord& scene, int image_size, std::uint64_t seed) {
  Image image(image_size, image_size, 3);
  std::mt19937_64 noise_rng(seed * 1000003ULL + static_cast<std::uint64_t>(scene.image_id));
  std::uniform_real_distribution<double> noise(-0.04, 0.04);
  for (int y = 0; y < image_size; ++y) {
    for (int x = 0; x < image_size; ++x) {
      for (int c = 0; c < 3; ++c) image.at(y, x, c) = kBackground[c] + noise(noise_rng);
    }
  }
  for (const auto& shape : scene.shapes) {
    const double* colour = kColours[shape.cls / 2];
    for (int dy = 0; dy < kShapeSize; ++dy) {
      for (int dx = 0; dx < kShapeSize; ++dx) {
        if (!covers(shape.cls, dx, dy)) continue;
        for (int c = 0; c < 3; ++c) image.at(shape.y + dy, shape.x + dx, c) = colour[c];
      }
    }
  }
  // Quantize to 8 bits so the in-memory scene matches its PNG.
  for (double& v : image.data) v = static_cast<double>(std::lround(v * 255.0)) / 255.0;
  return image;
}

SynthResult generate(const SynthConfig& config) {
  if (config.n_images < 10) throw UsageError("synthetic corpus needs at least 10 images");
  if (config.image_size < kShapeSize + 1 || config.image_size % 8 != 0) {
    throw UsageError("image size must be a multiple of 8 and fit one shape");
  }
  if (config.max_per_class < 0 || config.max_per_class > 4) {
    throw UsageError("max_per_class must lie in [0, 4]");
  }

  SynthResult result;
  VQACorpus& corpus = result.corpus;
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> count_dist(0, config.max_per_class);
  std::uniform_int_distribution<int> pos_dist(0, config.image_size - kShapeSize);
  std::uniform_int_distribution<int> class_dist(0, kNumClasses - 1);

  const int n_train = static_cast<int>(std::lround(0.7 * config.n_images));
  const int n_val = static_cast<int>(std::lround(0.1 * config.n_images));
  int total_dropped = 0;

  for (int i = 0; i < config.n_images; ++i) {
    SceneRecord scene;
    scene.image_id = i;
    for (int cls = 0; cls < kNumClasses; ++cls) {
      const int wanted = count_dist(rng);
      for (int k = 0; k < wanted; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < config.placement_attempts && !placed; ++attempt) {
          PlacedShape candidate{cls, pos_dist(rng), pos_dist(rng)};
          if (std::none_of(scene.shapes.begin(), scene.shapes.end(),
                           [&](const PlacedShape& s) { return overlaps(s, candidate); })) {
            scene.shapes.push_back(candidate);
            ++scene.counts[static_cast<std::size_t>(cls)];
            placed = true;
          }
        }
        if (!placed) ++scene.dropped;
      }
    }
    total_dropped += scene.dropped;

    ImageRecord record;
    record.id = i;
    char name[32];
    std::snprintf(name, sizeof(name), "images/%04d.png", i);
    record.file = name;
    record.split = i < n_train ? Split::kTrain
                               : (i < n_train + n_val ? Split::kVal : Split::kTest);
    corpus.images.push_back(record);

    const auto& counts = scene.counts;
    int total = 0;
    for (int c : counts) total += c;
    auto add = [&](QuestionType type, std::string text, std::string answer) {
      QuestionRecord q;
      q.id = static_cast<std::int64_t>(corpus.questions.size());
      q.img_id = i;
      q.type = type;
      q.text = std::move(text);
      q.answer = std::move(answer);
      corpus.questions.push_back(std::move(q));
    };
    const int present = class_dist(rng);
    add(QuestionType::kPresence, "is there a " + class_phrase(present, false) + "?",
        counts[static_cast<std::size_t>(present)] > 0 ? "yes" : "no");
    const int counted = class_dist(rng);
    add(QuestionType::kCount, "how many " + class_phrase(counted, true) + " are there?",
        std::to_string(counts[static_cast<std::size_t>(counted)]));
    const int first = class_dist(rng);
    const int second = (first + 1 + std::uniform_int_distribution<int>(0, kNumClasses - 2)(rng)) %
                       kNumClasses;
    add(QuestionType::kComparison,
        "are there more " + class_phrase(first, true) + " than " +
            class_phrase(second, true) + "?",
        counts[static_cast<std::size_t>(first)] > counts[static_cast<std::size_t>(second)]
            ? "yes"
            : "no");
    add(QuestionType::kRuralUrban, "is this a rural or an urban area?",
        total >= config.urban_threshold ? "urban" : "rural");

    result.images.push_back(render_scene(scene, config.image_size, config.seed));
    result.scenes.push_back(std::move(scene));
  }

  corpus.metadata["source"] = "synthbench";
  corpus.metadata["seed"] = std::to_string(config.seed);
  corpus.metadata["n_images"] = std::to_string(config.n_images);
  corpus.metadata["image_size"] = std::to_string(config.image_size);
  corpus.metadata["answer_count"] = std::to_string(kAnswerCount);
  corpus.metadata["placement_drops"] = std::to_string(total_dropped);
  validate(corpus);
  return result;
}

ParaphraseRules ParaphraseRules::parse(std::string_view text) {
  ParaphraseRules rules;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto a = line.find('\t');
    const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos) {
      throw DataError("paraphrase rule line " + std::to_string(line_no) +
                      " needs three tab-separated fields");
    }
    const std::string set = line.substr(0, a);
    RuleTable* table = set == "train" ? &rules.train_rules
                       : set == "heldout" ? &rules.heldout_rules
                                          : nullptr;
    if (!table) throw DataError("unknown paraphrase rule set '" + set + "'");
    table->add(line.substr(a + 1, b - a - 1), line.substr(b + 1));
  }
  return rules;
}

const ParaphraseRules& ParaphraseRules::shipped() {
  static const ParaphraseRules rules = parse(embedded::synth_paraphrase_rules());
  return rules;
}

std::vector<std::string> paraphrase_text(const std::string& text, const RuleTable& table) {
  std::vector<std::string> out;
  std::set<std::string> seen{normalize_text(text)};
  for (const auto& rule : table.rules()) {
    if (!std::regex_search(text, rule.compiled)) continue;
    std::string rewritten = std::regex_replace(text, rule.compiled, rule.replacement,
                                               std::regex_constants::format_first_only);
    if (seen.insert(normalize_text(rewritten)).second) out.push_back(std::move(rewritten));
  }
  return out;
}

VQACorpus rule_paraphrase(const VQACorpus& corpus, const ParaphraseRules& rules) {
  static constexpr Pivot kCycle[] = {Pivot::kZh, Pivot::kDe, Pivot::kFr};
  VQACorpus out = corpus;
  std::int64_t next_id = 0;
  for (const auto& q : corpus.questions) next_id = std::max(next_id, q.id + 1);
  const auto splits = image_splits(corpus);
  std::set<std::pair<std::int64_t, std::string>> existing;
  for (const auto& q : corpus.questions) {
    if (q.origin_id) existing.emplace(*q.origin_id, normalize_text(q.text));
  }

  std::size_t emitted = 0;
  for (const auto& q : corpus.questions) {
    if (!q.is_original()) continue;
    const bool test = splits.at(q.img_id) == Split::kTest;
    for (auto& text : paraphrase_text(q.text, test ? rules.heldout_rules : rules.train_rules)) {
      if (!existing.emplace(q.id, normalize_text(text)).second) continue;
      QuestionRecord p = q;
      p.id = next_id++;
      p.text = std::move(text);
      p.origin_id = q.id;
      p.pivot = kCycle[emitted++ % 3];
      out.questions.push_back(std::move(p));
    }
  }
  out.metadata["paraphrase.rules"] = "train:train+val,heldout:test";
  out.metadata["paraphrase.count"] = std::to_string(emitted);
  validate(out);
  return out;
}

VQACorpus write_corpus(const SynthResult& result, const VQACorpus& corpus,
                       const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "images", ec);
  if (ec) throw ExternalError("cannot create '" + (dir / "images").string() + "': " + ec.message());
  for (std::size_t i = 0; i < result.images.size(); ++i) {
    write_png(result.images[i], dir / result.corpus.images[i].file);
  }
  VQACorpus out = corpus;
  out.root = dir;
  save_corpus(out, dir / "corpus.json");
  return out;
}

}  // namespace rsvqa::synth
