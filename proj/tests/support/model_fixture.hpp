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

#ifndef RSVQA_TESTS_SUPPORT_MODEL_FIXTURE_HPP_
#define RSVQA_TESTS_SUPPORT_MODEL_FIXTURE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rsvqa/model.hpp"

namespace rsvqa::testing {

inline ModelDims small_dims() {
  ModelDims d;
  d.image_size = 16;
  d.conv_channels = {4, 5, 6};
  d.visual_dim = 7;
  d.embed_dim = 5;
  d.text_dim = 6;
  d.fused_dim = 8;
  d.max_question_len = 8;
  return d;
}

inline TextVocab small_vocab() {
  return TextVocab::from_tokens({"how", "many", "red", "blue", "circles", "squares", "are",
                                 "there", "is", "a", "?"});
}

inline Model small_model(std::uint64_t seed = 11, int num_answers = 5) {
  Model m;
  m.dims = small_dims();
  m.text_vocab = small_vocab();
  std::vector<std::string> answers;
  for (int i = 0; i < num_answers; ++i) answers.push_back("a" + std::to_string(i));
  m.answers = AnswerVocabulary(answers);
  m.dims.vocab_size = static_cast<int>(m.text_vocab.size());
  m.dims.num_answers = num_answers;
  m.params = init_params(m.dims, seed);
  return m;
}

// Smooth deterministic pattern with a seeded per-pixel perturbation.
inline Image pattern_image(int side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(-0.1, 0.1);
  Image image(side, side, 3);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double base = 0.5 + 0.35 * std::sin(0.7 * x + 1.3 * y + 2.1 * c +
                                                  static_cast<double>(seed % 7));
        image.at(y, x, c) = std::clamp(base + noise(rng), 0.0, 1.0);
      }
    }
  }
  return image;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                            double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

}  // namespace rsvqa::testing

#endif  // RSVQA_TESTS_SUPPORT_MODEL_FIXTURE_HPP_
