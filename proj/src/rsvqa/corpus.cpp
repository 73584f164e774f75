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

#include "rsvqa/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "rsvqa/errors.hpp"

namespace rsvqa {

using nlohmann::json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

std::string_view to_string(QuestionType type) {
  switch (type) {
    case QuestionType::kPresence: return "presence";
    case QuestionType::kCount: return "count";
    case QuestionType::kComparison: return "comparison";
    case QuestionType::kRuralUrban: return "rural_urban";
  }
  return "?";
}

std::string_view to_string(Pivot pivot) {
  switch (pivot) {
    case Pivot::kNone: return "none";
    case Pivot::kZh: return "zh";
    case Pivot::kDe: return "de";
    case Pivot::kFr: return "fr";
  }
  return "?";
}

std::string_view display_name(QuestionType type) {
  switch (type) {
    case QuestionType::kPresence: return "Presence";
    case QuestionType::kCount: return "Count";
    case QuestionType::kComparison: return "Comparison";
    case QuestionType::kRuralUrban: return "Rural/Urban";
  }
  return "?";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  if (text == "test") return Split::kTest;
  throw DataError("unknown split '" + std::string(text) + "'");
}

QuestionType parse_question_type(std::string_view text) {
  for (auto type : kAllQuestionTypes) {
    if (to_string(type) == text) return type;
  }
  throw DataError("unknown question type '" + std::string(text) + "'");
}

Pivot parse_pivot(std::string_view text) {
  if (text == "none") return Pivot::kNone;
  if (text == "zh") return Pivot::kZh;
  if (text == "de") return Pivot::kDe;
  if (text == "fr") return Pivot::kFr;
  throw DataError("unknown pivot '" + std::string(text) + "'");
}

const ImageRecord* VQACorpus::find_image(std::int64_t id) const {
  for (const auto& image : images) {
    if (image.id == id) return &image;
  }
  return nullptr;
}

const QuestionRecord* VQACorpus::find_question(std::int64_t id) const {
  for (const auto& q : questions) {
    if (q.id == id) return &q;
  }
  return nullptr;
}

std::optional<Split> VQACorpus::split_of(const QuestionRecord& q) const {
  if (const auto* image = find_image(q.img_id)) return image->split;
  return std::nullopt;
}

bool VQACorpus::same_content(const VQACorpus& other) const {
  return images == other.images && questions == other.questions &&
         metadata == other.metadata;
}

void validate(const VQACorpus& corpus) {
  std::unordered_set<std::int64_t> image_ids;
  for (const auto& image : corpus.images) {
    if (!image_ids.insert(image.id).second) {
      throw DataError("duplicate image id " + std::to_string(image.id));
    }
    if (image.file.empty()) {
      throw DataError("image " + std::to_string(image.id) + " has an empty file path");
    }
  }

  std::unordered_map<std::int64_t, const QuestionRecord*> by_id;
  by_id.reserve(corpus.questions.size());
  for (const auto& q : corpus.questions) {
    const std::string qid = std::to_string(q.id);
    if (!by_id.emplace(q.id, &q).second) {
      throw DataError("duplicate question id " + qid);
    }
    if (!image_ids.count(q.img_id)) {
      throw DataError("question " + qid + " references missing image id " +
                      std::to_string(q.img_id));
    }
    if (q.text.empty()) throw DataError("question " + qid + " has empty text");
    if ((q.pivot == Pivot::kNone) != !q.origin_id.has_value()) {
      throw DataError("question " + qid +
                      ": pivot must be 'none' exactly when origin_id is null");
    }
  }

  // (origin, pivot, text) triples must be unique.
  std::set<std::tuple<std::int64_t, Pivot, std::string>> seen;
  for (const auto& q : corpus.questions) {
    if (!q.origin_id) continue;
    const std::string qid = std::to_string(q.id);
    auto it = by_id.find(*q.origin_id);
    if (it == by_id.end()) {
      throw DataError("question " + qid + " references missing origin id " +
                      std::to_string(*q.origin_id));
    }
    const QuestionRecord& origin = *it->second;
    if (origin.pivot != Pivot::kNone) {
      throw DataError("question " + qid + " has origin " + std::to_string(origin.id) +
                      " which is itself a paraphrase");
    }
    if (origin.img_id != q.img_id || origin.type != q.type ||
        origin.answer != q.answer) {
      throw DataError("question " + qid +
                      " disagrees with its origin on img_id, type or answer");
    }
    if (!seen.emplace(*q.origin_id, q.pivot, q.text).second) {
      throw DataError("question " + qid + " duplicates a sibling paraphrase");
    }
  }
}

namespace {

template <typename T>
T require(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw DataError(where + ": missing field '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw DataError(where + ": field '" + key + "' has the wrong type");
  }
}

json to_json(const ImageRecord& image) {
  return json{{"id", image.id}, {"file", image.file}, {"split", to_string(image.split)}};
}

json to_json(const QuestionRecord& q) {
  json out{{"id", q.id},
           {"img_id", q.img_id},
           {"type", to_string(q.type)},
           {"text", q.text},
           {"answer", q.answer},
           {"pivot", to_string(q.pivot)}};
  out["origin_id"] = q.origin_id ? json(*q.origin_id) : json(nullptr);
  return out;
}

}  // namespace

VQACorpus parse_corpus(std::string_view json_text, const std::filesystem::path& root) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("corpus JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("corpus JSON must be an object");

  VQACorpus corpus;
  corpus.root = root;
  if (auto it = doc.find("metadata"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) throw DataError("corpus metadata must be an object");
    for (const auto& [key, value] : it->items()) {
      corpus.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
  }

  const auto images = doc.find("images");
  const auto questions = doc.find("questions");
  if (images == doc.end() || !images->is_array()) {
    throw DataError("corpus JSON needs an 'images' array");
  }
  if (questions == doc.end() || !questions->is_array()) {
    throw DataError("corpus JSON needs a 'questions' array");
  }

  corpus.images.reserve(images->size());
  for (std::size_t i = 0; i < images->size(); ++i) {
    const json& item = (*images)[i];
    const std::string where = "images[" + std::to_string(i) + "]";
    ImageRecord image;
    image.id = require<std::int64_t>(item, "id", where);
    image.file = require<std::string>(item, "file", where);
    image.split = parse_split(require<std::string>(item, "split", where));
    corpus.images.push_back(std::move(image));
  }

  corpus.questions.reserve(questions->size());
  for (std::size_t i = 0; i < questions->size(); ++i) {
    const json& item = (*questions)[i];
    const std::string where = "questions[" + std::to_string(i) + "]";
    QuestionRecord q;
    q.id = require<std::int64_t>(item, "id", where);
    q.img_id = require<std::int64_t>(item, "img_id", where);
    q.type = parse_question_type(require<std::string>(item, "type", where));
    q.text = require<std::string>(item, "text", where);
    q.answer = require<std::string>(item, "answer", where);
    if (auto it = item.find("origin_id"); it != item.end() && !it->is_null()) {
      q.origin_id = require<std::int64_t>(item, "origin_id", where);
    }
    q.pivot = parse_pivot(require<std::string>(item, "pivot", where));
    corpus.questions.push_back(std::move(q));
  }

  validate(corpus);
  return corpus;
}

VQACorpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str(), path.parent_path());
}

std::string serialize_corpus(const VQACorpus& corpus) {
  // One record per line keeps large corpora diffable.
  std::string out = "{\n  \"metadata\": ";
  json metadata = json::object();
  for (const auto& [key, value] : corpus.metadata) metadata[key] = value;
  out += metadata.dump();
  out += ",\n  \"images\": [";
  for (std::size_t i = 0; i < corpus.images.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    out += to_json(corpus.images[i]).dump();
  }
  out += corpus.images.empty() ? "],\n" : "\n  ],\n";
  out += "  \"questions\": [";
  for (std::size_t i = 0; i < corpus.questions.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    out += to_json(corpus.questions[i]).dump();
  }
  out += corpus.questions.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

void save_corpus(const VQACorpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ExternalError("cannot open '" + path.string() + "' for writing");
  out << serialize_corpus(corpus);
  if (!out) throw ExternalError("failed writing '" + path.string() + "'");
}

VQACorpus rebase_corpus(const VQACorpus& corpus, const std::filesystem::path& new_root) {
  namespace fs = std::filesystem;
  VQACorpus out = corpus;
  const fs::path from = fs::weakly_canonical(fs::absolute(corpus.root));
  const fs::path to = fs::weakly_canonical(fs::absolute(new_root));
  out.root = new_root;
  if (from == to) return out;
  for (auto& image : out.images) {
    const fs::path file(image.file);
    if (file.is_absolute()) continue;
    image.file = fs::weakly_canonical(from / file).lexically_relative(to).generic_string();
  }
  return out;
}

VQACorpus originals_only(const VQACorpus& corpus) {
  VQACorpus out;
  out.images = corpus.images;
  out.metadata = corpus.metadata;
  out.root = corpus.root;
  for (const auto& q : corpus.questions) {
    if (q.is_original()) out.questions.push_back(q);
  }
  return out;
}

AnswerVocabulary::AnswerVocabulary(std::vector<std::string> answers)
    : answers_(std::move(answers)) {
  for (std::size_t i = 0; i < answers_.size(); ++i) {
    if (!index_.emplace(answers_[i], static_cast<int>(i)).second) {
      throw DataError("duplicate answer '" + answers_[i] + "' in answer pool");
    }
  }
}

std::unordered_map<std::int64_t, Split> image_splits(const VQACorpus& corpus) {
  std::unordered_map<std::int64_t, Split> splits;
  for (const auto& image : corpus.images) splits.emplace(image.id, image.split);
  return splits;
}

AnswerVocabulary AnswerVocabulary::build(const VQACorpus& corpus) {
  const auto splits = image_splits(corpus);
  std::set<std::string> distinct;
  for (const auto& q : corpus.questions) {
    auto it = splits.find(q.img_id);
    if (it != splits.end() && it->second == Split::kTrain) distinct.insert(q.answer);
  }
  if (distinct.empty()) {
    throw DataError("cannot build answer pool: training split has no questions");
  }
  return AnswerVocabulary({distinct.begin(), distinct.end()});
}

std::optional<int> AnswerVocabulary::find(const std::string& answer) const {
  auto it = index_.find(answer);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<ParaphraseGroup> paraphrase_groups(const VQACorpus& corpus) {
  std::vector<ParaphraseGroup> groups;
  std::unordered_map<std::int64_t, std::size_t> slot;
  for (const auto& q : corpus.questions) {
    if (!q.is_original()) continue;
    slot.emplace(q.id, groups.size());
    groups.push_back(ParaphraseGroup{q, {}});
  }
  for (const auto& q : corpus.questions) {
    if (q.is_original()) continue;
    if (auto it = slot.find(*q.origin_id); it != slot.end()) {
      groups[it->second].paraphrases.push_back(q);
    }
  }
  return groups;
}

ImageStore ImageStore::load(const VQACorpus& corpus, std::optional<Split> split) {
  ImageStore store;
  for (const auto& record : corpus.images) {
    if (split && record.split != *split) continue;
    store.insert(record.id, read_png(corpus.root / record.file));
  }
  return store;
}

void ImageStore::insert(std::int64_t id, Image image) {
  images_[id] = std::make_shared<const Image>(std::move(image));
}

std::shared_ptr<const Image> ImageStore::get(std::int64_t id) const {
  auto it = images_.find(id);
  if (it == images_.end()) {
    throw DataError("image " + std::to_string(id) + " is not loaded");
  }
  return it->second;
}

BatchSampler::BatchSampler(const VQACorpus& corpus, Split split,
                           const AnswerVocabulary& answers, const ImageStore* images)
    : answers_(answers), images_(images) {
  const auto splits = image_splits(corpus);
  for (auto& group : paraphrase_groups(corpus)) {
    auto it = splits.find(group.original.img_id);
    if (it != splits.end() && it->second == split) groups_.push_back(std::move(group));
  }
  if (groups_.empty()) {
    throw DataError("split '" + std::string(to_string(split)) +
                    "' has no original questions");
  }
}

std::vector<SampleBatch> BatchSampler::epoch(std::size_t batch_size,
                                             std::mt19937_64& rng) const {
  if (batch_size == 0) throw UsageError("batch size must be at least 1");
  std::vector<std::size_t> order(groups_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<SampleBatch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    SampleBatch batch;
    for (std::size_t k = start; k < end; ++k) {
      const ParaphraseGroup& group = groups_[order[k]];
      const QuestionRecord& q = group.original;
      batch.ids.push_back(q.id);
      batch.image_ids.push_back(q.img_id);
      if (images_) batch.images.push_back(images_->get(q.img_id));
      batch.question_texts.push_back(q.text);
      if (group.paraphrases.empty()) {
        batch.paraphrase_texts.push_back(q.text);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, group.paraphrases.size() - 1);
        batch.paraphrase_texts.push_back(group.paraphrases[pick(rng)].text);
      }
      batch.labels.push_back(answers_.find(q.answer).value_or(-1));
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

std::vector<SampleBatch> make_batches(const VQACorpus& corpus, Split split,
                                      std::size_t batch_size, std::uint64_t seed,
                                      const AnswerVocabulary& answers,
                                      const ImageStore* images) {
  std::mt19937_64 rng(seed);
  return BatchSampler(corpus, split, answers, images).epoch(batch_size, rng);
}

}  // namespace rsvqa
