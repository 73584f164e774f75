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

#include "rsvqa/text.hpp"

namespace rsvqa {
namespace {

TEST(NormalizeText, LowercasesTrimsAndStripsTrailingPunctuation) {
  EXPECT_EQ(normalize_text("  How   many roads ? "), "how many roads");
  EXPECT_EQ(normalize_text("How many roads?"), "how many roads");
  EXPECT_EQ(normalize_text("IS THERE\ta road!?"), "is there a road");
}

TEST(SplitTokens, PunctuationIsItsOwnToken) {
  EXPECT_EQ(split_tokens("How many roads?"),
            (std::vector<std::string>{"how", "many", "roads", "?"}));
  EXPECT_EQ(split_tokens("a,b"), (std::vector<std::string>{"a", ",", "b"}));
}

TextVocab roads_vocab() { return TextVocab::from_tokens({"how", "many", "roads", "?"}); }

TEST(Tokenize, PadsToMaxLength) {
  const TextVocab vocab = roads_vocab();
  ASSERT_EQ(vocab.index("how"), 2);
  ASSERT_EQ(vocab.index("?"), 5);
  const TokenSequence seq = tokenize("How many roads?", vocab, 6);
  EXPECT_EQ(seq.ids, (std::vector<int>{2, 3, 4, 5, 0, 0}));
  EXPECT_EQ(seq.length, 4);
}

TEST(Tokenize, UnknownWordMapsToUnk) {
  const TokenSequence seq = tokenize("how many lakes?", roads_vocab(), 6);
  EXPECT_EQ(seq.ids, (std::vector<int>{2, 3, TextVocab::kUnk, 5, 0, 0}));
}

TEST(Tokenize, TruncatesLongText) {
  const TokenSequence seq = tokenize("how many roads how many roads?", roads_vocab(), 4);
  EXPECT_EQ(seq.ids, (std::vector<int>{2, 3, 4, 2}));
  EXPECT_EQ(seq.length, 4);
}

TEST(TextVocab, BuildIsSortedAfterReservedTokens) {
  const TextVocab vocab = TextVocab::build({"b a?", "a c"});
  EXPECT_EQ(vocab.tokens(),
            (std::vector<std::string>{"<pad>", "<unk>", "?", "a", "b", "c"}));
  EXPECT_EQ(vocab.index("zzz"), TextVocab::kUnk);
}

}  // namespace
}  // namespace rsvqa
