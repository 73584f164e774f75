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

#ifndef RSVQA_TEXT_HPP_
#define RSVQA_TEXT_HPP_

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rsvqa {

// Lowercase, collapse whitespace runs, trim, and strip trailing punctuation.
std::string normalize_text(std::string_view text);

// Lowercase, then split on whitespace with every ASCII punctuation character
// emitted as its own token.
std::vector<std::string> split_tokens(std::string_view text);

class TextVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";

  TextVocab();

  // Reserved tokens first, then `tokens` in the given order (duplicates and
  // reserved names skipped).
  static TextVocab from_tokens(const std::vector<std::string>& tokens);

  // Reserved tokens, then every distinct token of `texts` in sorted order.
  static TextVocab build(const std::vector<std::string>& texts);

  int index(const std::string& token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }

  bool operator==(const TextVocab& other) const { return tokens_ == other.tokens_; }

 private:
  void add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct TokenSequence {
  std::vector<int> ids;  // padded to max_len with kPad
  int length = 0;        // number of real tokens, <= max_len
};

TokenSequence tokenize(std::string_view text, const TextVocab& vocab, int max_len);

}  // namespace rsvqa

#endif  // RSVQA_TEXT_HPP_
