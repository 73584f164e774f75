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

#ifndef RSVQA_EVALUATION_HPP_
#define RSVQA_EVALUATION_HPP_

// Per-type accuracy, AA / OA, the train/test setting matrix, and report
// rendering (JSON, Markdown, CSV, bar-chart PNG).

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rsvqa/corpus.hpp"
#include "rsvqa/image_io.hpp"
#include "rsvqa/model.hpp"

namespace rsvqa {

enum class QuestionFilter { kOriginalsOnly, kParaphrasesOnly, kAll };

std::string_view to_string(QuestionFilter filter);
QuestionFilter parse_question_filter(std::string_view text);  // UsageError

struct Prediction {
  std::int64_t question_id = 0;
  std::string predicted;
  std::string gold;
  QuestionType type = QuestionType::kPresence;
  bool gold_in_pool = true;
};

using PredictionSet = std::vector<Prediction>;

struct TypeScore {
  std::int64_t correct = 0;
  std::int64_t total = 0;
  double accuracy() const {
    return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  }
  bool operator==(const TypeScore&) const = default;
};

struct MetricsReport {
  std::string setting;
  std::map<QuestionType, TypeScore> per_type;  // only types present
  double average_accuracy = 0.0;                // unweighted over types
  double overall_accuracy = 0.0;                // correct / total
  std::int64_t out_of_pool = 0;

  std::int64_t correct() const;
  std::int64_t total() const;
};

// Exact-string accuracy. Throws DataError on an empty set.
MetricsReport score(const PredictionSet& predictions, std::string setting = {});

// Frozen forward pass over every question of `split` that passes `filter`,
// in corpus order. Gold answers outside the model's pool always count as
// wrong. Loads images from corpus.root unless `images` is given.
PredictionSet evaluate_model(const Model& model, const VQACorpus& corpus, Split split,
                             QuestionFilter filter, const ImageStore* images = nullptr);

inline constexpr const char* kSettingOriginalOriginal = "original->original";
inline constexpr const char* kSettingOriginalAugmented = "original->augmented";
inline constexpr const char* kSettingAugmentedAugmented = "augmented->augmented";

// `models` and `corpora` must both provide "original" and "augmented".
// Produces original->original, original->augmented and augmented->augmented,
// in that order, each scored with every question of `split`.
std::vector<MetricsReport> run_setting_matrix(
    const std::map<std::string, const Model*>& models,
    const std::map<std::string, const VQACorpus*>& corpora, Split split = Split::kTest);

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(std::string_view text);  // DataError

// Table with one column per report and rows Presence, Count, Comparison,
// Rural/Urban, AA, OA; values rounded to four decimals.
std::string render_markdown(const std::vector<MetricsReport>& reports);
std::string render_csv(const std::vector<MetricsReport>& reports);

// Bars for the four type accuracies, AA and OA on a [0, 1] axis.
Image render_bar_chart(const MetricsReport& report);

}  // namespace rsvqa

#endif  // RSVQA_EVALUATION_HPP_
