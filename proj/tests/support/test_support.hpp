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

#ifndef RSVQA_TESTS_SUPPORT_TEST_SUPPORT_HPP_
#define RSVQA_TESTS_SUPPORT_TEST_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "harness.hpp"
#include "rsvqa/corpus.hpp"
#include "rsvqa/image_io.hpp"

namespace rsvqa::testing {

// Uniform-colour PNG of the given side written to dir/file.
inline void write_solid_png(const std::filesystem::path& path, int side, double r, double g,
                            double b) {
  Image image(side, side, 3);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      image.at(y, x, 0) = r;
      image.at(y, x, 1) = g;
      image.at(y, x, 2) = b;
    }
  }
  std::filesystem::create_directories(path.parent_path());
  write_png(image, path);
}

inline QuestionRecord make_question(std::int64_t id, std::int64_t img_id, QuestionType type,
                                    std::string text, std::string answer) {
  QuestionRecord q;
  q.id = id;
  q.img_id = img_id;
  q.type = type;
  q.text = std::move(text);
  q.answer = std::move(answer);
  return q;
}

inline QuestionRecord make_paraphrase(std::int64_t id, const QuestionRecord& origin,
                                      Pivot pivot, std::string text) {
  QuestionRecord q = origin;
  q.id = id;
  q.origin_id = origin.id;
  q.pivot = pivot;
  q.text = std::move(text);
  return q;
}

}  // namespace rsvqa::testing

#endif  // RSVQA_TESTS_SUPPORT_TEST_SUPPORT_HPP_
