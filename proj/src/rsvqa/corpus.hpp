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

#ifndef RSVQA_CORPUS_HPP_
#define RSVQA_CORPUS_HPP_

// Corpus data model: images, questions with paraphrase provenance, the answer
// pool, and seeded batch assembly.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rsvqa/image_io.hpp"

namespace rsvqa {

enum class Split { kTrain, kVal, kTest };
enum class QuestionType { kPresence, kCount, kComparison, kRuralUrban };
enum class Pivot { kNone, kZh, kDe, kFr };

inline constexpr QuestionType kAllQuestionTypes[] = {
    QuestionType::kPresence, QuestionType::kCount, QuestionType::kComparison,
    QuestionType::kRuralUrban};

std::string_view to_string(Split split);
std::string_view to_string(QuestionType type);
std::string_view to_string(Pivot pivot);

// The parse_* functions throw DataError on unknown literals.
Split parse_split(std::string_view text);
QuestionType parse_question_type(std::string_view text);
Pivot parse_pivot(std::string_view text);

// Human-readable row label ("Rural/Urban" etc.).
std::string_view display_name(QuestionType type);

struct ImageRecord {
  std::int64_t id = 0;
  std::string file;
  Split split = Split::kTrain;

  bool operator==(const ImageRecord&) const = default;
};

struct QuestionRecord {
  std::int64_t id = 0;
  std::int64_t img_id = 0;
  QuestionType type = QuestionType::kPresence;
  std::string text;
  std::string answer;
  std::optional<std::int64_t> origin_id;
  Pivot pivot = Pivot::kNone;

  bool is_original() const { return pivot == Pivot::kNone; }
  bool operator==(const QuestionRecord&) const = default;
};

struct VQACorpus {
  std::vector<ImageRecord> images;
  std::vector<QuestionRecord> questions;
  std::map<std::string, std::string> metadata;
  // Directory image paths are resolved against. Not serialized.
  std::filesystem::path root;

  const ImageRecord* find_image(std::int64_t id) const;
  const QuestionRecord* find_question(std::int64_t id) const;
  std::optional<Split> split_of(const QuestionRecord& q) const;

  // Field-wise equality, ignoring `root`.
  bool same_content(const VQACorpus& other) const;
};

// image id -> split, for bulk lookups.
std::unordered_map<std::int64_t, Split> image_splits(const VQACorpus& corpus);

// Checks every corpus invariant; throws DataError naming the offending id.
void validate(const VQACorpus& corpus);

VQACorpus parse_corpus(std::string_view json_text,
                       const std::filesystem::path& root = {});
VQACorpus load_corpus(const std::filesystem::path& path);
std::string serialize_corpus(const VQACorpus& corpus);
void save_corpus(const VQACorpus& corpus, const std::filesystem::path& path);

// Rewrites relative image paths so they resolve against `new_root`.
VQACorpus rebase_corpus(const VQACorpus& corpus, const std::filesystem::path& new_root);

// Drops every paraphrase, keeping images, originals and metadata.
VQACorpus originals_only(const VQACorpus& corpus);

class AnswerVocabulary {
 public:
  AnswerVocabulary() = default;
  explicit AnswerVocabulary(std::vector<std::string> answers);

  // Distinct training-split answers, sorted. Throws DataError if the corpus
  // has no training questions.
  static AnswerVocabulary build(const VQACorpus& corpus);

  std::optional<int> find(const std::string& answer) const;
  const std::string& answer(int index) const { return answers_.at(index); }
  const std::vector<std::string>& answers() const { return answers_; }
  std::size_t size() const { return answers_.size(); }

  bool operator==(const AnswerVocabulary& other) const {
    return answers_ == other.answers_;
  }

 private:
  std::vector<std::string> answers_;
  std::unordered_map<std::string, int> index_;
};

struct ParaphraseGroup {
  QuestionRecord original;
  std::vector<QuestionRecord> paraphrases;

  std::size_t size() const { return 1 + paraphrases.size(); }
};

// One group per original, in corpus order.
std::vector<ParaphraseGroup> paraphrase_groups(const VQACorpus& corpus);

// Decoded images keyed by image id.
class ImageStore {
 public:
  ImageStore() = default;

  // Loads every image of `split` (all images when nullopt) from corpus.root.
  static ImageStore load(const VQACorpus& corpus,
                         std::optional<Split> split = std::nullopt);

  void insert(std::int64_t id, Image image);
  std::shared_ptr<const Image> get(std::int64_t id) const;
  std::size_t size() const { return images_.size(); }

 private:
  std::map<std::int64_t, std::shared_ptr<const Image>> images_;
};

struct SampleBatch {
  std::vector<std::int64_t> ids;
  std::vector<std::int64_t> image_ids;
  // Empty when batches were assembled without an ImageStore.
  std::vector<std::shared_ptr<const Image>> images;
  std::vector<std::string> question_texts;
  std::vector<std::string> paraphrase_texts;
  // Index into the answer pool, or -1 when the gold answer is outside it.
  std::vector<int> labels;

  std::size_t size() const { return ids.size(); }
};

// Assembles seeded epochs over the originals of one split.
class BatchSampler {
 public:
  BatchSampler(const VQACorpus& corpus, Split split,
               const AnswerVocabulary& answers,
               const ImageStore* images = nullptr);

  // One epoch: a seeded shuffle of the originals, chunked into batches of
  // `batch_size` (last one may be short). Each sample's paraphrase is drawn
  // uniformly from its group with `rng`; singleton groups use the original.
  std::vector<SampleBatch> epoch(std::size_t batch_size,
                                 std::mt19937_64& rng) const;

  std::size_t num_samples() const { return groups_.size(); }

 private:
  std::vector<ParaphraseGroup> groups_;
  const AnswerVocabulary& answers_;
  const ImageStore* images_;
};

// Convenience: one epoch with a freshly seeded generator.
std::vector<SampleBatch> make_batches(const VQACorpus& corpus, Split split,
                                      std::size_t batch_size, std::uint64_t seed,
                                      const AnswerVocabulary& answers,
                                      const ImageStore* images = nullptr);

}  // namespace rsvqa

#endif  // RSVQA_CORPUS_HPP_
