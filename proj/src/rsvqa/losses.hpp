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

#ifndef RSVQA_LOSSES_HPP_
#define RSVQA_LOSSES_HPP_

// Triplet hinge loss over fused features and the combined training objective.

#include <span>

#include "rsvqa/model.hpp"

namespace rsvqa {

// How the negative rows are derived from the anchors.
enum class NegativeScheme {
  kReverse,      // negative_i = anchor_{B-1-i}
  kCyclicShift,  // negative_i = anchor_{(i+1) mod B}
};

struct TripletFeatures {
  Matrix anchor;    // fused (image, original question), B x D
  Matrix positive;  // fused (image, paraphrase), B x D
  Matrix negative;  // anchor rows permuted by the negative scheme
  double margin = 1.0;
};

// Negatives as a row permutation of `anchor`.
Matrix negatives_from(const Matrix& anchor, NegativeScheme scheme);

// Adjoint of negatives_from: routes a gradient on the negatives back onto the
// anchor rows they were taken from.
Matrix negatives_backward(const Matrix& d_negative, NegativeScheme scheme);

// Throws DataError on shape mismatch or an empty batch.
TripletFeatures build_triplet(const Matrix& anchor, const Matrix& positive,
                              NegativeScheme scheme, double margin);

// Mean over rows of max(|a-p| - |a-n| + margin, 0).
double triplet_loss(const TripletFeatures& t);

struct TripletGradient {
  double loss = 0.0;
  Matrix d_anchor, d_positive, d_negative;
};

// Subgradient: inactive rows (hinge argument <= 0) and zero distances
// contribute nothing.
TripletGradient triplet_loss_gradient(const TripletFeatures& t);

struct CrossEntropyResult {
  double loss = 0.0;  // mean over the batch
  Matrix d_logits;
};

// Throws DataError when a label lies outside [0, K).
CrossEntropyResult cross_entropy(const Matrix& logits, std::span<const int> labels);

struct LossBreakdown {
  double total = 0.0;
  double ce_original = 0.0;
  double ce_paraphrase = 0.0;
  double triplet = 0.0;
};

// CE(original) + CE(paraphrase) + triplet.
LossBreakdown total_loss(const Matrix& logits_original, const Matrix& logits_paraphrase,
                         std::span<const int> labels, const TripletFeatures& t);

}  // namespace rsvqa

#endif  // RSVQA_LOSSES_HPP_
