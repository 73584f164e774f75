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

#ifndef RSVQA_TRAINING_HPP_
#define RSVQA_TRAINING_HPP_

#include <functional>
#include <string>
#include <vector>

#include "rsvqa/checkpoint.hpp"
#include "rsvqa/config.hpp"
#include "rsvqa/corpus.hpp"
#include "rsvqa/losses.hpp"

namespace rsvqa {

struct EpochRecord {
  int epoch = 0;  // 1-based
  double total = 0.0;
  double ce_original = 0.0;
  double ce_paraphrase = 0.0;
  double triplet = 0.0;
  double val_oa = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  // Header "epoch,total,ce_a,ce_p,triplet,val_oa", one row per epoch.
  std::string to_csv() const;
  bool operator==(const TrainHistory&) const = default;
};

// Adam over a ParamSet.
class AdamOptimizer {
 public:
  AdamOptimizer(const ParamSet& params, double learning_rate, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);

  void step(ParamSet& params, const ParamSet& grads);
  long steps() const { return steps_; }

 private:
  ParamSet first_, second_;
  double learning_rate_, beta1_, beta2_, epsilon_;
  long steps_ = 0;
};

// Loss terms and gradients of one batch; `grads` must match the model's
// parameter layout and is accumulated into.
struct StepResult {
  LossBreakdown loss;
  std::size_t batch_size = 0;
};

StepResult compute_batch_gradients(const Model& model, const SampleBatch& batch,
                                   const TrainConfig& config, ParamSet& grads);

struct TrainResult {
  Checkpoint checkpoint;  // parameters from the epoch with the best val OA
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Baseline mode optimizes CE on originals only and never sees paraphrases
// (its text vocabulary is built from original training questions). Contrastive
// mode optimizes CE(original) + CE(paraphrase) + triplet. Images are loaded
// from corpus.root unless `images` is given. Throws RuntimeError on a
// non-finite loss, naming the epoch and batch.
TrainResult train(const VQACorpus& corpus, const TrainConfig& config,
                  const ImageStore* images = nullptr, const EpochCallback& on_epoch = {});

}  // namespace rsvqa

#endif  // RSVQA_TRAINING_HPP_
