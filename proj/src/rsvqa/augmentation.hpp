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

#ifndef RSVQA_AUGMENTATION_HPP_
#define RSVQA_AUGMENTATION_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsvqa/corpus.hpp"
#include "rsvqa/translator.hpp"

namespace rsvqa {

struct DedupPolicy {
  bool normalize = true;
  bool drop_equal_to_original = true;
  bool drop_equal_across_pivots = true;
};

bool is_duplicate(const std::string& candidate, const std::string& original,
                  const std::vector<std::string>& siblings, const DedupPolicy& policy);

// en -> pivot -> en. Failures are rethrown with the pivot and text attached.
std::string back_translate(const std::string& text, std::string_view pivot,
                           Translator& translator);

struct PivotReport {
  std::string pivot;
  std::int64_t kept = 0;
  std::int64_t equal_original = 0;
  std::int64_t equal_sibling = 0;

  std::int64_t dropped() const { return equal_original + equal_sibling; }
};

struct AugmentOptions {
  DedupPolicy policy;
  // First id for new questions; defaults to one past the largest existing id.
  std::optional<std::int64_t> id_base;
  // Upper bound on concurrent translation requests.
  std::size_t max_concurrency = 4;
};

struct AugmentResult {
  VQACorpus corpus;
  std::vector<PivotReport> reports;

  // [{"pivot": ..., "dropped": ..., "reasons": {...}}, ...]
  std::string drop_report_json() const;
};

// Adds one back-translated paraphrase per (original, pivot) unless the dedup
// policy drops it. Input records are kept unchanged and in order; new records
// follow, ordered by (original, pivot). Throws on the first translation
// failure without producing partial output.
AugmentResult augment_corpus(const VQACorpus& corpus,
                             const std::vector<std::string>& pivots,
                             Translator& translator, const AugmentOptions& options = {});

}  // namespace rsvqa

#endif  // RSVQA_AUGMENTATION_HPP_
