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

#ifndef RSVQA_TESTS_SUPPORT_ORACLES_HPP_
#define RSVQA_TESTS_SUPPORT_ORACLES_HPP_

// Direct re-implementations used as independent references. They avoid the
// library's Eigen code paths and work on plain nested vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rsvqa/model.hpp"

namespace rsvqa::testing {

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const Matrix& m) {
  Rows out(static_cast<std::size_t>(m.rows()), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  }
  return out;
}

inline double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sum);
}

// Mean over rows of max(d(F1_i, F2_i) - d(F1_i, F3_i) + m, 0), with F3 the
// row-reversed F1 (or F1 shifted by one row when `cyclic`).
inline double triplet_oracle(const Rows& f1, const Rows& f2, double margin,
                             bool cyclic = false) {
  const std::size_t b = f1.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t j = cyclic ? (i + 1) % b : b - 1 - i;
    const double term = l2_distance(f1[i], f2[i]) - l2_distance(f1[i], f1[j]) + margin;
    sum += term > 0.0 ? term : 0.0;
  }
  return sum / static_cast<double>(b);
}

// Mean negative log-softmax of the labelled entry.
inline double cross_entropy_oracle(const Rows& logits, const std::vector<int>& labels) {
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double peak = *std::max_element(logits[i].begin(), logits[i].end());
    double z = 0.0;
    for (double v : logits[i]) z += std::exp(v - peak);
    sum += -(logits[i][static_cast<std::size_t>(labels[i])] - peak - std::log(z));
  }
  return sum / static_cast<double>(logits.size());
}

}  // namespace rsvqa::testing

#endif  // RSVQA_TESTS_SUPPORT_ORACLES_HPP_
