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

#include "rsvqa/training.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "rsvqa/errors.hpp"
#include "rsvqa/evaluation.hpp"

namespace rsvqa {

std::string TrainHistory::to_csv() const {
  std::string out = "epoch,total,ce_a,ce_p,triplet,val_oa\n";
  char line[256];
  for (const auto& e : epochs) {
    std::snprintf(line, sizeof(line), "%d,%.10g,%.10g,%.10g,%.10g,%.10g\n", e.epoch, e.total,
                  e.ce_original, e.ce_paraphrase, e.triplet, e.val_oa);
    out += line;
  }
  return out;
}

AdamOptimizer::AdamOptimizer(const ParamSet& params, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : first_(zeros_like(params)),
      second_(zeros_like(params)),
      learning_rate_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon) {}

void AdamOptimizer::step(ParamSet& params, const ParamSet& grads) {
  ++steps_;
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (auto& [key, value] : params) {
    const Matrix& g = grads.at(key);
    Matrix& m = first_.at(key);
    Matrix& v = second_.at(key);
    m = beta1_ * m + (1.0 - beta1_) * g;
    v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
    value.array() -= learning_rate_ * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + epsilon_);
  }
}

StepResult compute_batch_gradients(const Model& model, const SampleBatch& batch,
                                   const TrainConfig& config, ParamSet& grads) {
  std::vector<const Image*> images;
  for (const auto& image : batch.images) images.push_back(image.get());
  if (images.size() != batch.size()) throw DataError("batch is missing image data");

  StepResult result;
  result.batch_size = batch.size();
  const auto visual = encode_images(images, model, true);
  const auto original = encode_questions(batch.question_texts, model, true);
  FusionCache fusion_a;
  const Matrix fused_a = fuse(visual.visual, original.text, model.params, &fusion_a);
  const Matrix logits_a = classify(fused_a, model.params);
  const auto ce_a = cross_entropy(logits_a, batch.labels);
  result.loss.ce_original = ce_a.loss;

  Matrix d_fused_a;
  classify_backward(fused_a, ce_a.d_logits, model.params, grads, &d_fused_a);

  Matrix d_visual, d_text;
  if (config.mode == TrainMode::kBaseline) {
    fuse_backward(fusion_a, d_fused_a, model.params, grads, &d_visual, &d_text);
    encode_questions_backward(original, d_text, model, grads);
    encode_images_backward(visual, d_visual, model, grads);
    result.loss.total = ce_a.loss;
    return result;
  }

  const auto paraphrase = encode_questions(batch.paraphrase_texts, model, true);
  FusionCache fusion_p;
  const Matrix fused_p = fuse(visual.visual, paraphrase.text, model.params, &fusion_p);
  const Matrix logits_p = classify(fused_p, model.params);
  const auto ce_p = cross_entropy(logits_p, batch.labels);
  const auto triplet = build_triplet(fused_a, fused_p, config.negative_scheme, config.margin);
  const auto t_grad = triplet_loss_gradient(triplet);
  result.loss.ce_paraphrase = ce_p.loss;
  result.loss.triplet = t_grad.loss;
  result.loss.total = ce_a.loss + ce_p.loss + t_grad.loss;

  // Negatives are anchor rows, so their gradient flows back into the anchors.
  d_fused_a += t_grad.d_anchor + negatives_backward(t_grad.d_negative, config.negative_scheme);
  Matrix d_fused_p;
  classify_backward(fused_p, ce_p.d_logits, model.params, grads, &d_fused_p);
  d_fused_p += t_grad.d_positive;

  Matrix d_visual_p, d_text_p;
  fuse_backward(fusion_a, d_fused_a, model.params, grads, &d_visual, &d_text);
  fuse_backward(fusion_p, d_fused_p, model.params, grads, &d_visual_p, &d_text_p);
  encode_questions_backward(original, d_text, model, grads);
  encode_questions_backward(paraphrase, d_text_p, model, grads);
  encode_images_backward(visual, d_visual + d_visual_p, model, grads);
  return result;
}

TrainResult train(const VQACorpus& input, const TrainConfig& config,
                  const ImageStore* images, const EpochCallback& on_epoch) {
  config.validate();
  const bool baseline = config.mode == TrainMode::kBaseline;
  const VQACorpus corpus = baseline ? originals_only(input) : input;

  ImageStore loaded;
  if (!images) {
    for (const auto& record : corpus.images) {
      if (record.split == Split::kTest) continue;
      loaded.insert(record.id, read_png(corpus.root / record.file));
    }
    images = &loaded;
  }

  Checkpoint current;
  Model& model = current.model;
  model.answers = AnswerVocabulary::build(corpus);
  const auto splits = image_splits(corpus);
  std::vector<std::string> train_texts;
  bool has_val = false;
  for (const auto& q : corpus.questions) {
    auto it = splits.find(q.img_id);
    if (it == splits.end()) continue;
    if (it->second == Split::kTrain) train_texts.push_back(q.text);
    if (it->second == Split::kVal) has_val = true;
  }
  model.text_vocab = TextVocab::build(train_texts);
  model.dims = config.dims;
  model.dims.vocab_size = static_cast<int>(model.text_vocab.size());
  model.dims.num_answers = static_cast<int>(model.answers.size());
  model.params = init_params(model.dims, config.seed);

  current.info["mode"] = std::string(to_string(config.mode));
  current.info["seed"] = std::to_string(config.seed);
  current.info["negative_scheme"] = std::string(to_string(config.negative_scheme));

  const BatchSampler sampler(corpus, Split::kTrain, model.answers, images);
  std::mt19937_64 rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  AdamOptimizer optimizer(model.params, config.learning_rate, config.adam_beta1,
                          config.adam_beta2, config.adam_epsilon);

  TrainResult result;
  double best_val = -1.0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = sampler.epoch(static_cast<std::size_t>(config.batch_size), rng);
    EpochRecord record;
    record.epoch = epoch;
    std::size_t seen = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      ParamSet grads = zeros_like(model.params);
      const StepResult step = compute_batch_gradients(model, batches[b], config, grads);
      if (!std::isfinite(step.loss.total)) {
        throw RuntimeError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(b));
      }
      optimizer.step(model.params, grads);
      const double w = static_cast<double>(step.batch_size);
      record.total += w * step.loss.total;
      record.ce_original += w * step.loss.ce_original;
      record.ce_paraphrase += w * step.loss.ce_paraphrase;
      record.triplet += w * step.loss.triplet;
      seen += step.batch_size;
    }
    const double n = static_cast<double>(seen);
    record.total /= n;
    record.ce_original /= n;
    record.ce_paraphrase /= n;
    record.triplet /= n;
    if (!all_finite(model.params)) {
      throw RuntimeError("non-finite parameters after epoch " + std::to_string(epoch));
    }

    if (has_val) {
      const auto predictions =
          evaluate_model(model, corpus, Split::kVal,
                         baseline ? QuestionFilter::kOriginalsOnly : QuestionFilter::kAll,
                         images);
      record.val_oa = score(predictions).overall_accuracy;
    }
    result.history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);

    if (!has_val || record.val_oa > best_val) {
      best_val = record.val_oa;
      result.checkpoint = current;
      result.checkpoint.info["epoch"] = std::to_string(epoch);
      char oa[32];
      std::snprintf(oa, sizeof(oa), "%.6f", record.val_oa);
      result.checkpoint.info["val_oa"] = oa;
    }
  }
  return result;
}

}  // namespace rsvqa
