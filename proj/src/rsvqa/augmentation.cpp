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

#include "rsvqa/augmentation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "rsvqa/errors.hpp"
#include "rsvqa/text.hpp"

namespace rsvqa {
namespace {

std::string comparable(const std::string& text, const DedupPolicy& policy) {
  return policy.normalize ? normalize_text(text) : text;
}

// Translates `texts` with at most `workers` threads; results keep input order.
std::vector<std::string> translate_all(const std::vector<std::string>& texts,
                                       std::string_view pivot, Translator& translator,
                                       std::size_t workers) {
  std::vector<std::string> results(texts.size());
  std::vector<std::exception_ptr> failures(texts.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  // No new requests are started once any request has failed.
  auto work = [&] {
    for (std::size_t i = next++; i < texts.size() && !failed; i = next++) {
      try {
        results[i] = back_translate(texts[i], pivot, translator);
      } catch (...) {
        failures[i] = std::current_exception();
        failed = true;
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, texts.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
  }
  // Report the earliest failed text among those attempted.
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return results;
}

}  // namespace

bool is_duplicate(const std::string& candidate, const std::string& original,
                  const std::vector<std::string>& siblings, const DedupPolicy& policy) {
  const std::string c = comparable(candidate, policy);
  if (policy.drop_equal_to_original && c == comparable(original, policy)) return true;
  if (policy.drop_equal_across_pivots) {
    for (const auto& sibling : siblings) {
      if (c == comparable(sibling, policy)) return true;
    }
  }
  return false;
}

std::string back_translate(const std::string& text, std::string_view pivot,
                           Translator& translator) {
  if (text.empty()) throw UsageError("cannot back-translate empty text");
  std::string result;
  try {
    result = translator.translate(translator.translate(text, "en", pivot), pivot, "en");
  } catch (const Error& e) {
    throw Error(e.kind(), "back-translation via " + std::string(pivot) + " failed for '" +
                              text + "': " + e.what());
  }
  if (result.empty()) {
    throw ExternalError("back-translation via " + std::string(pivot) +
                        " returned empty text for '" + text + "'");
  }
  return result;
}

std::string AugmentResult::drop_report_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& report : reports) {
    out.push_back({{"pivot", report.pivot},
                   {"dropped", report.dropped()},
                   {"reasons",
                    {{"equal_original", report.equal_original},
                     {"equal_sibling", report.equal_sibling}}}});
  }
  return out.dump(2) + "\n";
}

AugmentResult augment_corpus(const VQACorpus& corpus,
                             const std::vector<std::string>& pivots,
                             Translator& translator, const AugmentOptions& options) {
  std::vector<Pivot> pivot_tags;
  for (const auto& code : pivots) {
    Pivot tag = Pivot::kNone;
    try {
      tag = parse_pivot(code);
    } catch (const DataError&) {
    }
    if (tag == Pivot::kNone) throw UsageError("unsupported pivot language '" + code + "'");
    if (std::find(pivot_tags.begin(), pivot_tags.end(), tag) != pivot_tags.end()) {
      throw UsageError("pivot '" + code + "' listed twice");
    }
    pivot_tags.push_back(tag);
  }

  std::int64_t max_id = -1;
  for (const auto& q : corpus.questions) max_id = std::max(max_id, q.id);
  const std::int64_t id_base = options.id_base.value_or(max_id + 1);
  if (id_base <= max_id) {
    throw UsageError("id base " + std::to_string(id_base) +
                     " collides with existing question ids (max " +
                     std::to_string(max_id) + ")");
  }

  const auto groups = paraphrase_groups(corpus);
  // Sibling texts per group: existing paraphrases plus kept candidates.
  std::vector<std::vector<std::string>> siblings(groups.size());
  std::vector<std::vector<std::pair<Pivot, std::string>>> existing(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const auto& p : groups[g].paraphrases) {
      siblings[g].push_back(p.text);
      existing[g].emplace_back(p.pivot, p.text);
    }
  }

  std::vector<std::string> originals;
  originals.reserve(groups.size());
  for (const auto& group : groups) originals.push_back(group.original.text);

  // kept[g][k] = accepted text for pivot k of group g.
  std::vector<std::vector<std::optional<std::string>>> kept(
      groups.size(), std::vector<std::optional<std::string>>(pivot_tags.size()));

  AugmentResult result;
  for (std::size_t k = 0; k < pivot_tags.size(); ++k) {
    const auto translated =
        translate_all(originals, pivots[k], translator, options.max_concurrency);
    PivotReport report;
    report.pivot = pivots[k];
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const std::string& candidate = translated[g];
      const bool same_pivot_clash = std::any_of(
          existing[g].begin(), existing[g].end(), [&](const auto& entry) {
            return entry.first == pivot_tags[k] && entry.second == candidate;
          });
      if (options.policy.drop_equal_to_original &&
          is_duplicate(candidate, originals[g], {}, {options.policy.normalize, true, false})) {
        ++report.equal_original;
      } else if (same_pivot_clash ||
                 is_duplicate(candidate, originals[g], siblings[g],
                              {options.policy.normalize, false,
                               options.policy.drop_equal_across_pivots})) {
        ++report.equal_sibling;
      } else {
        ++report.kept;
        siblings[g].push_back(candidate);
        kept[g][k] = candidate;
      }
    }
    result.reports.push_back(report);
  }

  result.corpus = corpus;
  std::int64_t next_id = id_base;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const QuestionRecord& origin = groups[g].original;
    for (std::size_t k = 0; k < pivot_tags.size(); ++k) {
      if (!kept[g][k]) continue;
      QuestionRecord q;
      q.id = next_id++;
      q.img_id = origin.img_id;
      q.type = origin.type;
      q.text = *kept[g][k];
      q.answer = origin.answer;
      q.origin_id = origin.id;
      q.pivot = pivot_tags[k];
      result.corpus.questions.push_back(std::move(q));
    }
  }

  if (!pivots.empty()) {
    std::string joined;
    for (const auto& code : pivots) joined += (joined.empty() ? "" : ",") + code;
    result.corpus.metadata["augment.pivots"] = joined;
    for (const auto& report : result.reports) {
      result.corpus.metadata["augment.dropped." + report.pivot] =
          std::to_string(report.dropped());
    }
  }
  validate(result.corpus);
  return result;
}

}  // namespace rsvqa
