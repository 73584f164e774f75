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

#ifndef RSVQA_MODEL_HPP_
#define RSVQA_MODEL_HPP_

// Toy multimodal classifier: a three-layer convolutional image encoder, a GRU
// question encoder, multiplicative fusion and a linear answer classifier.
// Every stage has a hand-written backward pass; everything runs in double.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rsvqa/corpus.hpp"
#include "rsvqa/image_io.hpp"
#include "rsvqa/text.hpp"

namespace rsvqa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Named parameter tensors; vectors are stored as n x 1 matrices.
using ParamSet = std::map<std::string, Matrix>;

ParamSet zeros_like(const ParamSet& params);
std::size_t parameter_count(const ParamSet& params);
bool all_finite(const ParamSet& params);

struct ModelDims {
  int image_size = 32;  // square inputs; must be divisible by 8
  int image_channels = 3;
  std::array<int, 3> conv_channels{16, 32, 32};
  int visual_dim = 64;
  int embed_dim = 32;
  int text_dim = 64;
  int fused_dim = 64;
  int max_question_len = 20;
  int vocab_size = 0;
  int num_answers = 0;

  // Throws UsageError on inconsistent values.
  void validate() const;
  int flat_dim() const;  // pooled width feeding the visual projection
  bool operator==(const ModelDims&) const = default;
};

// Fan-in scaled uniform weights, zero biases.
ParamSet init_params(const ModelDims& dims, std::uint64_t seed);

struct Model {
  ModelDims dims;
  TextVocab text_vocab;
  AnswerVocabulary answers;
  ParamSet params;
};

// --- image encoder ---------------------------------------------------------

struct ConvCache {
  Matrix cols;          // im2col of the layer input, (C*9) x (H*W)
  RowMatrix activated;  // tanh(conv), O x (H*W)
  int height = 0;
  int width = 0;
};

struct ImageCache {
  std::array<ConvCache, 3> conv;
  Vector flat;
  Vector visual;
  double inv_sd = 0.0;  // of the standardized projection
};

// Image (H x W x C, values in [0,1]) -> visual feature of size visual_dim:
// three conv/tanh/avg-pool stages, global average pool, linear projection,
// per-sample standardization.
Vector encode_image(const Image& image, const ParamSet& params, const ModelDims& dims,
                    ImageCache* cache = nullptr);
void encode_image_backward(const ImageCache& cache, const Vector& d_visual,
                           const ParamSet& params, const ModelDims& dims,
                           ParamSet& grads);

// --- question encoder ------------------------------------------------------

struct QuestionCache {
  std::vector<int> tokens;
  std::vector<Vector> hidden;  // h_0 .. h_len
  std::vector<Vector> reset, update, candidate, hidden_lin;
};

// Runs the GRU over the first `length` tokens and returns the final state.
// Throws UsageError if the sequence is empty.
Vector encode_question(const TokenSequence& tokens, const ParamSet& params,
                       QuestionCache* cache = nullptr);
void encode_question_backward(const QuestionCache& cache, const Vector& d_hidden,
                              const ParamSet& params, ParamSet& grads);

// --- fusion and classifier (rows are samples) ------------------------------

struct FusionCache {
  Matrix visual, text;
  Matrix visual_proj, text_proj;  // tanh outputs
};

// fused = tanh(visual W_v^T + b_v) .* tanh(text W_t^T + b_t)
Matrix fuse(const Matrix& visual, const Matrix& text, const ParamSet& params,
            FusionCache* cache = nullptr);
void fuse_backward(const FusionCache& cache, const Matrix& d_fused,
                   const ParamSet& params, ParamSet& grads, Matrix* d_visual,
                   Matrix* d_text);

Matrix classify(const Matrix& fused, const ParamSet& params);
void classify_backward(const Matrix& fused, const Matrix& d_logits,
                       const ParamSet& params, ParamSet& grads, Matrix* d_fused);

// --- batched helpers -------------------------------------------------------

struct EncodedImages {
  Matrix visual;  // B x visual_dim
  std::vector<ImageCache> caches;
};

struct EncodedQuestions {
  Matrix text;  // B x text_dim
  std::vector<QuestionCache> caches;
};

EncodedImages encode_images(std::span<const Image* const> images, const Model& model,
                            bool keep_cache);
void encode_images_backward(const EncodedImages& encoded, const Matrix& d_visual,
                            const Model& model, ParamSet& grads);

EncodedQuestions encode_questions(std::span<const std::string> texts, const Model& model,
                                  bool keep_cache);
void encode_questions_backward(const EncodedQuestions& encoded, const Matrix& d_text,
                               const Model& model, ParamSet& grads);

struct ForwardResult {
  Matrix logits;  // B x num_answers
  Matrix fused;   // B x fused_dim
};

ForwardResult forward(std::span<const Image* const> images,
                      std::span<const std::string> texts, const Model& model);

// Argmax per row; ties resolve to the lowest index.
std::vector<int> predict(const Matrix& logits);

}  // namespace rsvqa

#endif  // RSVQA_MODEL_HPP_
