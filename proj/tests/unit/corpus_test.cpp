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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "rsvqa/corpus.hpp"
#include "rsvqa/errors.hpp"
#include "rsvqa/synth.hpp"
#include "test_support.hpp"

namespace rsvqa {
namespace {

using testing::make_paraphrase;
using testing::make_question;

VQACorpus two_image_fixture() {
  VQACorpus c;
  c.images = {{1, "images/a.png", Split::kTrain}, {2, "images/b.png", Split::kTest}};
  c.questions = {make_question(10, 1, QuestionType::kPresence, "is there a road?", "yes"),
                 make_question(11, 1, QuestionType::kCount, "how many roads are there?", "2"),
                 make_question(12, 2, QuestionType::kRuralUrban,
                               "is this a rural or an urban area?", "rural")};
  c.metadata = {{"source", "fixture"}, {"seed", "1"}};
  return c;
}

TEST(Corpus, JsonRoundTripKeepsEveryField) {
  VQACorpus c = two_image_fixture();
  c.questions.push_back(make_paraphrase(13, c.questions[0], Pivot::kDe,
                                        "does the image contain a road?"));
  validate(c);
  const VQACorpus back = parse_corpus(serialize_corpus(c));
  EXPECT_EQ(back.images.size(), 2u);
  EXPECT_EQ(back.questions.size(), 4u);
  EXPECT_TRUE(back.same_content(c));
  EXPECT_EQ(serialize_corpus(back), serialize_corpus(c));
}

TEST(Corpus, FileRoundTripSetsRoot) {
  testing::TempDir dir;
  const VQACorpus c = two_image_fixture();
  save_corpus(c, dir / "corpus.json");
  const VQACorpus back = load_corpus(dir / "corpus.json");
  EXPECT_TRUE(back.same_content(c));
  EXPECT_EQ(back.root, dir.path());
}

TEST(Corpus, MissingImageIsNamed) {
  VQACorpus c = two_image_fixture();
  c.questions.push_back(make_question(20, 99, QuestionType::kPresence, "is there a lake?", "no"));
  try {
    validate(c);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("99"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_corpus(serialize_corpus(c)), DataError);
}

TEST(Corpus, RejectsBrokenProvenance) {
  VQACorpus c = two_image_fixture();
  QuestionRecord orphan = make_paraphrase(30, c.questions[0], Pivot::kZh, "x?");
  orphan.origin_id = 77;
  c.questions.push_back(orphan);
  EXPECT_THROW(validate(c), DataError);

  c = two_image_fixture();
  QuestionRecord no_pivot = make_paraphrase(30, c.questions[0], Pivot::kZh, "x?");
  no_pivot.pivot = Pivot::kNone;
  c.questions.push_back(no_pivot);
  EXPECT_THROW(validate(c), DataError);

  c = two_image_fixture();
  QuestionRecord wrong_answer = make_paraphrase(30, c.questions[0], Pivot::kZh, "x?");
  wrong_answer.answer = "no";
  c.questions.push_back(wrong_answer);
  EXPECT_THROW(validate(c), DataError);

  c = two_image_fixture();
  c.questions.push_back(c.questions[0]);
  EXPECT_THROW(validate(c), DataError);
}

TEST(Corpus, MalformedJsonIsDataError) {
  EXPECT_THROW(parse_corpus("{"), DataError);
  EXPECT_THROW(parse_corpus("[]"), DataError);
  EXPECT_THROW(parse_corpus(R"({"images": [{"id": 1}], "questions": []})"), DataError);
}

TEST(Corpus, RebaseKeepsImagesReachable) {
  VQACorpus c = two_image_fixture();
  c.root = "/data/synth";
  const VQACorpus moved = rebase_corpus(c, "/data/aug");
  EXPECT_EQ(moved.images[0].file, "../synth/images/a.png");
  EXPECT_EQ(moved.root, std::filesystem::path("/data/aug"));
}

TEST(Corpus, OriginalsOnlyDropsParaphrases) {
  VQACorpus c = two_image_fixture();
  c.questions.push_back(make_paraphrase(13, c.questions[0], Pivot::kFr, "is there one road?"));
  const VQACorpus o = originals_only(c);
  EXPECT_EQ(o.questions.size(), 3u);
  EXPECT_EQ(o.images, c.images);
}

TEST(AnswerVocabulary, DedupAndSortTrainAnswers) {
  VQACorpus c;
  c.images = {{1, "a.png", Split::kTrain}, {2, "b.png", Split::kTest}};
  c.questions = {make_question(1, 1, QuestionType::kPresence, "q1", "yes"),
                 make_question(2, 1, QuestionType::kPresence, "q2", "no"),
                 make_question(3, 1, QuestionType::kPresence, "q3", "yes"),
                 make_question(4, 2, QuestionType::kPresence, "q4", "maybe")};
  const AnswerVocabulary vocab = AnswerVocabulary::build(c);
  EXPECT_EQ(vocab.answers(), (std::vector<std::string>{"no", "yes"}));
  EXPECT_FALSE(vocab.find("maybe").has_value());
  EXPECT_EQ(vocab.find("yes"), 1);
}

TEST(AnswerVocabulary, NoTrainingQuestionsIsDataError) {
  VQACorpus c;
  c.images = {{1, "a.png", Split::kTest}};
  c.questions = {make_question(1, 1, QuestionType::kPresence, "q", "yes")};
  EXPECT_THROW(AnswerVocabulary::build(c), DataError);
}

TEST(AnswerVocabulary, SynthCorpusMatchesDeclaredAnswerCount) {
  synth::SynthConfig config;
  config.n_images = 200;
  const auto result = synth::generate(config);
  EXPECT_EQ(AnswerVocabulary::build(result.corpus).size(),
            static_cast<std::size_t>(synth::kAnswerCount));
}

VQACorpus grouped_fixture(int originals, int paraphrases_per_group_pattern) {
  VQACorpus c;
  c.images = {{1, "a.png", Split::kTrain}};
  std::int64_t next = 1000;
  const Pivot pivots[] = {Pivot::kZh, Pivot::kDe, Pivot::kFr};
  for (int i = 0; i < originals; ++i) {
    c.questions.push_back(make_question(i + 1, 1, QuestionType::kCount,
                                        "how many things " + std::to_string(i) + "?",
                                        std::to_string(i % 5)));
  }
  for (int i = 0; i < originals; ++i) {
    const int k = paraphrases_per_group_pattern < 0 ? (i < 50 ? 3 : 2)
                                                    : paraphrases_per_group_pattern;
    for (int p = 0; p < k; ++p) {
      c.questions.push_back(make_paraphrase(next++, c.questions[i], pivots[p],
                                            "variant " + std::to_string(p) + " of " +
                                                std::to_string(i)));
    }
  }
  return c;
}

TEST(ParaphraseGroups, GroupSizes) {
  VQACorpus c = grouped_fixture(2, 0);
  c.questions.push_back(make_paraphrase(50, c.questions[0], Pivot::kZh, "a"));
  c.questions.push_back(make_paraphrase(51, c.questions[0], Pivot::kDe, "b"));
  c.questions.push_back(make_paraphrase(52, c.questions[0], Pivot::kFr, "c"));
  const auto groups = paraphrase_groups(c);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].size(), 4u);
  EXPECT_EQ(groups[1].size(), 1u);
}

TEST(ParaphraseGroups, HundredOriginalsTwoHundredFiftyParaphrases) {
  const VQACorpus c = grouped_fixture(100, -1);
  validate(c);
  ASSERT_EQ(c.questions.size(), 350u);
  const auto groups = paraphrase_groups(c);
  std::size_t members = 0;
  for (const auto& g : groups) members += g.size();
  EXPECT_EQ(groups.size(), 100u);
  EXPECT_EQ(members, 350u);
}

TEST(BatchSampler, SeededBatchSizes) {
  const VQACorpus c = grouped_fixture(5, 0);
  const AnswerVocabulary vocab = AnswerVocabulary::build(c);
  const auto a = make_batches(c, Split::kTrain, 2, 7, vocab);
  const auto b = make_batches(c, Split::kTrain, 2, 7, vocab);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].size(), 2u);
  EXPECT_EQ(a[1].size(), 2u);
  EXPECT_EQ(a[2].size(), 1u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].ids, b[i].ids);
    EXPECT_EQ(a[i].paraphrase_texts, b[i].paraphrase_texts);
    EXPECT_EQ(a[i].labels, b[i].labels);
  }
}

TEST(BatchSampler, EpochCoversEveryOriginalOnce) {
  const VQACorpus c = grouped_fixture(23, 2);
  const AnswerVocabulary vocab = AnswerVocabulary::build(c);
  const auto batches = make_batches(c, Split::kTrain, 4, 3, vocab);
  std::multiset<std::int64_t> seen;
  for (const auto& b : batches) seen.insert(b.ids.begin(), b.ids.end());
  EXPECT_EQ(seen.size(), 23u);
  for (std::int64_t id = 1; id <= 23; ++id) EXPECT_EQ(seen.count(id), 1u);
}

TEST(BatchSampler, SingletonUsesOriginalText) {
  const VQACorpus c = grouped_fixture(3, 0);
  const AnswerVocabulary vocab = AnswerVocabulary::build(c);
  for (const auto& b : make_batches(c, Split::kTrain, 3, 1, vocab)) {
    EXPECT_EQ(b.question_texts, b.paraphrase_texts);
  }
}

TEST(BatchSampler, ParaphraseDrawsAreUniform) {
  const VQACorpus c = grouped_fixture(1, 3);
  const AnswerVocabulary vocab = AnswerVocabulary::build(c);
  const BatchSampler sampler(c, Split::kTrain, vocab);
  for (std::uint64_t seed : {1u, 2u, 3u, 42u}) {
    std::mt19937_64 rng(seed);
    std::map<std::string, int> counts;
    for (int draw = 0; draw < 3000; ++draw) {
      const auto batches = sampler.epoch(1, rng);
      ++counts[batches.at(0).paraphrase_texts.at(0)];
    }
    ASSERT_EQ(counts.size(), 3u);
    for (const auto& [text, n] : counts) {
      const double f = n / 3000.0;
      EXPECT_GE(f, 0.30) << text << " seed " << seed;
      EXPECT_LE(f, 0.37) << text << " seed " << seed;
    }
  }
}

TEST(BatchSampler, OutOfPoolLabelIsMinusOne) {
  VQACorpus c;
  c.images = {{1, "a.png", Split::kTrain}, {2, "b.png", Split::kTest}};
  c.questions = {make_question(1, 1, QuestionType::kPresence, "q1", "yes"),
                 make_question(2, 2, QuestionType::kPresence, "q2", "maybe")};
  const AnswerVocabulary vocab = AnswerVocabulary::build(c);
  const auto batches = make_batches(c, Split::kTest, 4, 1, vocab);
  ASSERT_EQ(batches.size(), 1u);
  EXPECT_EQ(batches[0].labels, std::vector<int>{-1});
}

}  // namespace
}  // namespace rsvqa
