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

#include "rsvqa/losses.hpp"

#include <algorithm>
#include <cmath>

#include "rsvqa/errors.hpp"

namespace rsvqa {
namespace {

Eigen::Index source_row(Eigen::Index i, Eigen::Index rows, NegativeScheme scheme) {
  return scheme == NegativeScheme::kReverse ? rows - 1 - i : (i + 1) % rows;
}

}  // namespace

Matrix negatives_from(const Matrix& anchor, NegativeScheme scheme) {
  Matrix out(anchor.rows(), anchor.cols());
  for (Eigen::Index i = 0; i < anchor.rows(); ++i) {
    out.row(i) = anchor.row(source_row(i, anchor.rows(), scheme));
  }
  return out;
}

Matrix negatives_backward(const Matrix& d_negative, NegativeScheme scheme) {
  Matrix out = Matrix::Zero(d_negative.rows(), d_negative.cols());
  for (Eigen::Index i = 0; i < d_negative.rows(); ++i) {
    out.row(source_row(i, d_negative.rows(), scheme)) += d_negative.row(i);
  }
  return out;
}

TripletFeatures build_triplet(const Matrix& anchor, const Matrix& positive,
                              NegativeScheme scheme, double margin) {
  if (anchor.rows() < 1) throw DataError("triplet batch must have at least one row");
  if (anchor.rows() != positive.rows() || anchor.cols() != positive.cols()) {
    throw DataError("anchor and positive features differ in shape");
  }
  if (!(margin >= 0.0)) throw UsageError("triplet margin must be non-negative");
  return TripletFeatures{anchor, positive, negatives_from(anchor, scheme), margin};
}

double triplet_loss(const TripletFeatures& t) {
  return triplet_loss_gradient(t).loss;
}

TripletGradient triplet_loss_gradient(const TripletFeatures& t) {
  const Eigen::Index rows = t.anchor.rows();
  if (rows < 1 || t.positive.rows() != rows || t.negative.rows() != rows ||
      t.positive.cols() != t.anchor.cols() || t.negative.cols() != t.anchor.cols()) {
    throw DataError("triplet features must share one non-empty shape");
  }
  TripletGradient g;
  g.d_anchor = Matrix::Zero(rows, t.anchor.cols());
  g.d_positive = Matrix::Zero(rows, t.anchor.cols());
  g.d_negative = Matrix::Zero(rows, t.anchor.cols());
  const double scale = 1.0 / static_cast<double>(rows);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::RowVectorXd to_pos = t.anchor.row(i) - t.positive.row(i);
    const Eigen::RowVectorXd to_neg = t.anchor.row(i) - t.negative.row(i);
    const double d_pos = to_pos.norm();
    const double d_neg = to_neg.norm();
    const double hinge = d_pos - d_neg + t.margin;
    if (hinge <= 0.0) continue;
    sum += hinge;
    if (d_pos > 0.0) {
      g.d_anchor.row(i) += scale * to_pos / d_pos;
      g.d_positive.row(i) -= scale * to_pos / d_pos;
    }
    if (d_neg > 0.0) {
      g.d_anchor.row(i) -= scale * to_neg / d_neg;
      g.d_negative.row(i) += scale * to_neg / d_neg;
    }
  }
  g.loss = sum * scale;
  return g;
}

CrossEntropyResult cross_entropy(const Matrix& logits, std::span<const int> labels) {
  const Eigen::Index rows = logits.rows();
  if (rows < 1 || static_cast<std::size_t>(rows) != labels.size()) {
    throw DataError("cross-entropy needs one label per logits row");
  }
  CrossEntropyResult out;
  out.d_logits.resize(rows, logits.cols());
  const double scale = 1.0 / static_cast<double>(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= logits.cols()) {
      throw DataError("label " + std::to_string(label) + " outside answer pool of size " +
                      std::to_string(logits.cols()));
    }
    const double peak = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd shifted = logits.row(i).array() - peak;
    const Eigen::RowVectorXd expd = shifted.array().exp();
    const double total = expd.sum();
    out.loss += (std::log(total) - shifted[label]) * scale;
    out.d_logits.row(i) = expd / total * scale;
    out.d_logits(i, label) -= scale;
  }
  return out;
}

LossBreakdown total_loss(const Matrix& logits_original, const Matrix& logits_paraphrase,
                         std::span<const int> labels, const TripletFeatures& t) {
  if (logits_original.rows() != logits_paraphrase.rows() ||
      logits_original.cols() != logits_paraphrase.cols()) {
    throw DataError("original and paraphrase logits differ in shape");
  }
  LossBreakdown out;
  out.ce_original = cross_entropy(logits_original, labels).loss;
  out.ce_paraphrase = cross_entropy(logits_paraphrase, labels).loss;
  out.triplet = triplet_loss(t);
  out.total = out.ce_original + out.ce_paraphrase + out.triplet;
  return out;
}

}  // namespace rsvqa
