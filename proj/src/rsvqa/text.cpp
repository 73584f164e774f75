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

#include "rsvqa/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "rsvqa/errors.hpp"

namespace rsvqa {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(lower(c));
  }
  while (!out.empty() && (is_punct(out.back()) || is_space(out.back()))) {
    out.pop_back();
  }
  return out;
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char c : text) {
    if (is_space(c)) {
      flush();
    } else if (is_punct(c)) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      current.push_back(lower(c));
    }
  }
  flush();
  return tokens;
}

TextVocab::TextVocab() {
  add(kPadToken);
  add(kUnkToken);
}

void TextVocab::add(const std::string& token) {
  if (index_.emplace(token, static_cast<int>(tokens_.size())).second) {
    tokens_.push_back(token);
  }
}

TextVocab TextVocab::from_tokens(const std::vector<std::string>& tokens) {
  TextVocab vocab;
  for (const auto& token : tokens) vocab.add(token);
  return vocab;
}

TextVocab TextVocab::build(const std::vector<std::string>& texts) {
  std::set<std::string> distinct;
  for (const auto& text : texts) {
    for (auto& token : split_tokens(text)) distinct.insert(std::move(token));
  }
  return from_tokens({distinct.begin(), distinct.end()});
}

int TextVocab::index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

TokenSequence tokenize(std::string_view text, const TextVocab& vocab, int max_len) {
  if (max_len < 1) throw UsageError("max_question_len must be at least 1");
  TokenSequence seq;
  seq.ids.assign(static_cast<std::size_t>(max_len), TextVocab::kPad);
  for (const auto& token : split_tokens(text)) {
    if (seq.length == max_len) break;
    seq.ids[static_cast<std::size_t>(seq.length++)] = vocab.index(token);
  }
  return seq;
}

}  // namespace rsvqa
