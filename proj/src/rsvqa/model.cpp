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

#include "rsvqa/model.hpp"

#include <cmath>
#include <random>

#include "rsvqa/errors.hpp"

namespace rsvqa {
namespace {

const char* kConvWeight[3] = {"img.conv1.w", "img.conv2.w", "img.conv3.w"};
const char* kConvBias[3] = {"img.conv1.b", "img.conv2.b", "img.conv3.b"};
constexpr double kNormEpsilon = 1e-5;

Matrix tanh_of(const Matrix& m) { return m.array().tanh().matrix(); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Zero-padded 3x3 patches, rows ordered (channel, ky, kx).
Matrix im2col(const RowMatrix& input, int height, int width) {
  const int channels = static_cast<int>(input.rows());
  Matrix cols = Matrix::Zero(channels * 9, height * width);
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const int row = c * 9 + ky * 3 + kx;
        for (int y = 0; y < height; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= height) continue;
          for (int x = 0; x < width; ++x) {
            const int sx = x + kx - 1;
            if (sx < 0 || sx >= width) continue;
            cols(row, y * width + x) = input(c, sy * width + sx);
          }
        }
      }
    }
  }
  return cols;
}

RowMatrix col2im(const Matrix& cols, int channels, int height, int width) {
  RowMatrix out = RowMatrix::Zero(channels, height * width);
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const int row = c * 9 + ky * 3 + kx;
        for (int y = 0; y < height; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= height) continue;
          for (int x = 0; x < width; ++x) {
            const int sx = x + kx - 1;
            if (sx < 0 || sx >= width) continue;
            out(c, sy * width + sx) += cols(row, y * width + x);
          }
        }
      }
    }
  }
  return out;
}

RowMatrix avg_pool(const RowMatrix& input, int height, int width) {
  const int oh = height / 2, ow = width / 2;
  RowMatrix out(input.rows(), oh * ow);
  for (Eigen::Index c = 0; c < input.rows(); ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const int base = 2 * y * width + 2 * x;
        out(c, y * ow + x) = 0.25 * (input(c, base) + input(c, base + 1) +
                                     input(c, base + width) + input(c, base + width + 1));
      }
    }
  }
  return out;
}

RowMatrix avg_pool_backward(const RowMatrix& d_out, int height, int width) {
  const int oh = height / 2, ow = width / 2;
  RowMatrix d_in = RowMatrix::Zero(d_out.rows(), height * width);
  for (Eigen::Index c = 0; c < d_out.rows(); ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const double g = 0.25 * d_out(c, y * ow + x);
        const int base = 2 * y * width + 2 * x;
        d_in(c, base) += g;
        d_in(c, base + 1) += g;
        d_in(c, base + width) += g;
        d_in(c, base + width + 1) += g;
      }
    }
  }
  return d_in;
}

const Matrix& param(const ParamSet& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw DataError("missing model parameter '" + key + "'");
  return it->second;
}

Matrix& grad(ParamSet& grads, const std::string& key) {
  auto it = grads.find(key);
  if (it == grads.end()) throw DataError("missing gradient slot '" + key + "'");
  return it->second;
}

}  // namespace

ParamSet zeros_like(const ParamSet& params) {
  ParamSet out;
  for (const auto& [key, value] : params) out.emplace(key, Matrix::Zero(value.rows(), value.cols()));
  return out;
}

std::size_t parameter_count(const ParamSet& params) {
  std::size_t n = 0;
  for (const auto& [key, value] : params) n += static_cast<std::size_t>(value.size());
  return n;
}

bool all_finite(const ParamSet& params) {
  for (const auto& [key, value] : params) {
    if (!value.allFinite()) return false;
  }
  return true;
}

void ModelDims::validate() const {
  auto positive = [](int v, const char* name) {
    if (v <= 0) throw UsageError(std::string("model dimension ") + name + " must be positive");
  };
  positive(image_size, "image_size");
  positive(image_channels, "image_channels");
  for (int c : conv_channels) positive(c, "conv channels");
  positive(visual_dim, "visual");
  positive(embed_dim, "embed");
  positive(text_dim, "text");
  positive(fused_dim, "fused");
  positive(max_question_len, "max_question_len");
  if (image_size % 8 != 0) throw UsageError("image_size must be divisible by 8");
}

int ModelDims::flat_dim() const {
  return conv_channels[2];
}

ParamSet init_params(const ModelDims& dims, std::uint64_t seed) {
  dims.validate();
  if (dims.vocab_size < 2 || dims.num_answers < 1) {
    throw UsageError("model needs a text vocabulary and at least one answer");
  }
  ParamSet p;
  int in_ch = dims.image_channels;
  for (int l = 0; l < 3; ++l) {
    p[kConvWeight[l]] = Matrix(dims.conv_channels[l], in_ch * 9);
    p[kConvBias[l]] = Matrix::Zero(dims.conv_channels[l], 1);
    in_ch = dims.conv_channels[l];
  }
  p["img.proj.w"] = Matrix(dims.visual_dim, dims.flat_dim());
  p["img.proj.b"] = Matrix::Zero(dims.visual_dim, 1);
  p["txt.embed"] = Matrix(dims.vocab_size, dims.embed_dim);
  p["txt.gru.w_ih"] = Matrix(3 * dims.text_dim, dims.embed_dim);
  p["txt.gru.w_hh"] = Matrix(3 * dims.text_dim, dims.text_dim);
  p["txt.gru.b_ih"] = Matrix::Zero(3 * dims.text_dim, 1);
  p["txt.gru.b_hh"] = Matrix::Zero(3 * dims.text_dim, 1);
  p["fuse.v.w"] = Matrix(dims.fused_dim, dims.visual_dim);
  p["fuse.v.b"] = Matrix::Zero(dims.fused_dim, 1);
  p["fuse.t.w"] = Matrix(dims.fused_dim, dims.text_dim);
  p["fuse.t.b"] = Matrix::Zero(dims.fused_dim, 1);
  p["cls.w"] = Matrix(dims.num_answers, dims.fused_dim);
  p["cls.b"] = Matrix::Zero(dims.num_answers, 1);

  std::mt19937_64 rng(seed);
  for (auto& [key, value] : p) {
    const bool is_bias = key.ends_with(".b") || key.find(".b_") != std::string::npos;
    if (is_bias) continue;
    double bound;
    if (key == "txt.embed") {
      bound = 1.0;
    } else if (key.rfind("txt.gru.", 0) == 0) {
      bound = 1.0 / std::sqrt(static_cast<double>(dims.text_dim));
    } else {
      // Unit-variance preactivations for unit-variance inputs.
      bound = std::sqrt(3.0 / static_cast<double>(value.cols()));
    }
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < value.size(); ++i) value.data()[i] = dist(rng);
  }
  return p;
}

Vector encode_image(const Image& image, const ParamSet& params, const ModelDims& dims,
                    ImageCache* cache) {
  if (image.height != dims.image_size || image.width != dims.image_size ||
      image.channels != dims.image_channels) {
    throw DataError("image shape " + std::to_string(image.height) + "x" +
                    std::to_string(image.width) + "x" + std::to_string(image.channels) +
                    " does not match model input " + std::to_string(dims.image_size) +
                    "x" + std::to_string(dims.image_size) + "x" +
                    std::to_string(dims.image_channels));
  }
  int height = image.height, width = image.width;
  RowMatrix x(image.channels, height * width);
  for (int y = 0; y < height; ++y) {
    for (int xx = 0; xx < width; ++xx) {
      for (int c = 0; c < image.channels; ++c) x(c, y * width + xx) = 2.0 * image.at(y, xx, c) - 1.0;
    }
  }

  for (int l = 0; l < 3; ++l) {
    Matrix cols = im2col(x, height, width);
    Matrix pre = param(params, kConvWeight[l]) * cols;
    pre.colwise() += param(params, kConvBias[l]).col(0);
    RowMatrix activated = pre.array().tanh().matrix();
    x = avg_pool(activated, height, width);
    if (cache) {
      cache->conv[l].cols = std::move(cols);
      cache->conv[l].activated = std::move(activated);
      cache->conv[l].height = height;
      cache->conv[l].width = width;
    }
    height /= 2;
    width /= 2;
  }

  // Global average pool over the final feature map.
  Vector flat = x.rowwise().mean();
  Vector pre = param(params, "img.proj.w") * flat + param(params, "img.proj.b").col(0);
  // Per-sample standardization; a saturating activation here lets the
  // optimizer park the visual feature at a constant early in training.
  const double mean = pre.mean();
  const double inv_sd = 1.0 / std::sqrt((pre.array() - mean).square().mean() + kNormEpsilon);
  Vector visual = ((pre.array() - mean) * inv_sd).matrix();
  if (cache) {
    cache->inv_sd = inv_sd;
    cache->flat = std::move(flat);
    cache->visual = visual;
  }
  return visual;
}

void encode_image_backward(const ImageCache& cache, const Vector& d_visual,
                           const ParamSet& params, const ModelDims& dims,
                           ParamSet& grads) {
  const Vector& y = cache.visual;
  const double n = static_cast<double>(y.size());
  const Vector d_pre =
      cache.inv_sd *
      (d_visual.array() - d_visual.mean() - y.array() * (d_visual.dot(y) / n)).matrix();
  grad(grads, "img.proj.w").noalias() += d_pre * cache.flat.transpose();
  grad(grads, "img.proj.b").col(0) += d_pre;
  const Vector d_flat = param(params, "img.proj.w").transpose() * d_pre;

  const int side = dims.image_size / 8;
  RowMatrix d_x = (d_flat / static_cast<double>(side * side)).replicate(1, side * side);
  for (int l = 2; l >= 0; --l) {
    const ConvCache& layer = cache.conv[l];
    const RowMatrix d_act = avg_pool_backward(d_x, layer.height, layer.width);
    const Matrix d_conv =
        (d_act.array() * (1.0 - layer.activated.array().square())).matrix();
    grad(grads, kConvWeight[l]).noalias() += d_conv * layer.cols.transpose();
    grad(grads, kConvBias[l]).col(0) += d_conv.rowwise().sum();
    if (l > 0) {
      const Matrix d_cols = param(params, kConvWeight[l]).transpose() * d_conv;
      d_x = col2im(d_cols, static_cast<int>(d_cols.rows() / 9), layer.height, layer.width);
    }
  }
}

Vector encode_question(const TokenSequence& tokens, const ParamSet& params,
                       QuestionCache* cache) {
  if (tokens.length < 1 || tokens.length > static_cast<int>(tokens.ids.size())) {
    throw UsageError("question encoder needs 1 <= length <= max_len, got length " +
                     std::to_string(tokens.length));
  }
  const Matrix& embed = param(params, "txt.embed");
  const Matrix& w_ih = param(params, "txt.gru.w_ih");
  const Matrix& w_hh = param(params, "txt.gru.w_hh");
  const Vector b_ih = param(params, "txt.gru.b_ih").col(0);
  const Vector b_hh = param(params, "txt.gru.b_hh").col(0);
  const Eigen::Index hdim = w_hh.cols();

  Vector h = Vector::Zero(hdim);
  if (cache) {
    *cache = QuestionCache{};
    cache->hidden.push_back(h);
  }
  for (int t = 0; t < tokens.length; ++t) {
    const int token = tokens.ids[static_cast<std::size_t>(t)];
    if (token < 0 || token >= embed.rows()) {
      throw DataError("token index " + std::to_string(token) + " outside vocabulary");
    }
    const Vector x = embed.row(token).transpose();
    const Vector gi = w_ih * x + b_ih;
    const Vector gh = w_hh * h + b_hh;
    Vector r(hdim), z(hdim), n(hdim);
    for (Eigen::Index k = 0; k < hdim; ++k) {
      r[k] = sigmoid(gi[k] + gh[k]);
      z[k] = sigmoid(gi[hdim + k] + gh[hdim + k]);
      n[k] = std::tanh(gi[2 * hdim + k] + r[k] * gh[2 * hdim + k]);
    }
    Vector next = ((1.0 - z.array()) * n.array() + z.array() * h.array()).matrix();
    if (cache) {
      cache->tokens.push_back(token);
      cache->reset.push_back(r);
      cache->update.push_back(z);
      cache->candidate.push_back(n);
      cache->hidden_lin.push_back(gh.segment(2 * hdim, hdim));
      cache->hidden.push_back(next);
    }
    h = std::move(next);
  }
  return h;
}

void encode_question_backward(const QuestionCache& cache, const Vector& d_hidden,
                              const ParamSet& params, ParamSet& grads) {
  const Matrix& w_ih = param(params, "txt.gru.w_ih");
  const Matrix& w_hh = param(params, "txt.gru.w_hh");
  Matrix& g_embed = grad(grads, "txt.embed");
  Matrix& g_w_ih = grad(grads, "txt.gru.w_ih");
  Matrix& g_w_hh = grad(grads, "txt.gru.w_hh");
  Matrix& g_b_ih = grad(grads, "txt.gru.b_ih");
  Matrix& g_b_hh = grad(grads, "txt.gru.b_hh");
  const Matrix& embed = param(params, "txt.embed");
  const Eigen::Index hdim = w_hh.cols();

  Vector dh = d_hidden;
  Vector d_gi(3 * hdim), d_gh(3 * hdim);
  for (int t = static_cast<int>(cache.tokens.size()) - 1; t >= 0; --t) {
    const auto& r = cache.reset[t];
    const auto& z = cache.update[t];
    const auto& n = cache.candidate[t];
    const auto& h_prev = cache.hidden[t];
    const auto& hn = cache.hidden_lin[t];
    for (Eigen::Index k = 0; k < hdim; ++k) {
      const double dn = dh[k] * (1.0 - z[k]);
      const double dz = dh[k] * (h_prev[k] - n[k]);
      const double dn_pre = dn * (1.0 - n[k] * n[k]);
      const double dz_pre = dz * z[k] * (1.0 - z[k]);
      const double dr_pre = dn_pre * hn[k] * r[k] * (1.0 - r[k]);
      d_gi[k] = dr_pre;
      d_gi[hdim + k] = dz_pre;
      d_gi[2 * hdim + k] = dn_pre;
      d_gh[k] = dr_pre;
      d_gh[hdim + k] = dz_pre;
      d_gh[2 * hdim + k] = dn_pre * r[k];
    }
    const int token = cache.tokens[t];
    g_w_ih.noalias() += d_gi * embed.row(token);
    g_b_ih.col(0) += d_gi;
    g_w_hh.noalias() += d_gh * h_prev.transpose();
    g_b_hh.col(0) += d_gh;
    g_embed.row(token).noalias() += (w_ih.transpose() * d_gi).transpose();
    dh = (dh.array() * z.array()).matrix() + w_hh.transpose() * d_gh;
  }
}

Matrix fuse(const Matrix& visual, const Matrix& text, const ParamSet& params,
            FusionCache* cache) {
  const Matrix& w_v = param(params, "fuse.v.w");
  const Matrix& w_t = param(params, "fuse.t.w");
  if (visual.cols() != w_v.cols() || text.cols() != w_t.cols() ||
      visual.rows() != text.rows()) {
    throw DataError("fusion input shapes do not match the model dimensions");
  }
  Matrix pv = visual * w_v.transpose();
  pv.rowwise() += param(params, "fuse.v.b").col(0).transpose();
  Matrix pt = text * w_t.transpose();
  pt.rowwise() += param(params, "fuse.t.b").col(0).transpose();
  pv = tanh_of(pv);
  pt = tanh_of(pt);
  Matrix fused = pv.cwiseProduct(pt);
  if (cache) {
    cache->visual = visual;
    cache->text = text;
    cache->visual_proj = std::move(pv);
    cache->text_proj = std::move(pt);
  }
  return fused;
}

void fuse_backward(const FusionCache& cache, const Matrix& d_fused,
                   const ParamSet& params, ParamSet& grads, Matrix* d_visual,
                   Matrix* d_text) {
  const Matrix d_pv = (d_fused.array() * cache.text_proj.array() *
                       (1.0 - cache.visual_proj.array().square()))
                          .matrix();
  const Matrix d_pt = (d_fused.array() * cache.visual_proj.array() *
                       (1.0 - cache.text_proj.array().square()))
                          .matrix();
  grad(grads, "fuse.v.w").noalias() += d_pv.transpose() * cache.visual;
  grad(grads, "fuse.v.b").col(0) += d_pv.colwise().sum().transpose();
  grad(grads, "fuse.t.w").noalias() += d_pt.transpose() * cache.text;
  grad(grads, "fuse.t.b").col(0) += d_pt.colwise().sum().transpose();
  if (d_visual) *d_visual = d_pv * param(params, "fuse.v.w");
  if (d_text) *d_text = d_pt * param(params, "fuse.t.w");
}

Matrix classify(const Matrix& fused, const ParamSet& params) {
  Matrix logits = fused * param(params, "cls.w").transpose();
  logits.rowwise() += param(params, "cls.b").col(0).transpose();
  return logits;
}

void classify_backward(const Matrix& fused, const Matrix& d_logits,
                       const ParamSet& params, ParamSet& grads, Matrix* d_fused) {
  grad(grads, "cls.w").noalias() += d_logits.transpose() * fused;
  grad(grads, "cls.b").col(0) += d_logits.colwise().sum().transpose();
  if (d_fused) *d_fused = d_logits * param(params, "cls.w");
}

EncodedImages encode_images(std::span<const Image* const> images, const Model& model,
                            bool keep_cache) {
  EncodedImages out;
  out.visual.resize(static_cast<Eigen::Index>(images.size()), model.dims.visual_dim);
  if (keep_cache) out.caches.resize(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!images[i]) throw DataError("batch is missing image data");
    out.visual.row(static_cast<Eigen::Index>(i)) =
        encode_image(*images[i], model.params, model.dims,
                     keep_cache ? &out.caches[i] : nullptr)
            .transpose();
  }
  return out;
}

void encode_images_backward(const EncodedImages& encoded, const Matrix& d_visual,
                            const Model& model, ParamSet& grads) {
  for (std::size_t i = 0; i < encoded.caches.size(); ++i) {
    encode_image_backward(encoded.caches[i],
                          d_visual.row(static_cast<Eigen::Index>(i)).transpose(),
                          model.params, model.dims, grads);
  }
}

EncodedQuestions encode_questions(std::span<const std::string> texts, const Model& model,
                                  bool keep_cache) {
  EncodedQuestions out;
  out.text.resize(static_cast<Eigen::Index>(texts.size()), model.dims.text_dim);
  if (keep_cache) out.caches.resize(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto tokens = tokenize(texts[i], model.text_vocab, model.dims.max_question_len);
    out.text.row(static_cast<Eigen::Index>(i)) =
        encode_question(tokens, model.params, keep_cache ? &out.caches[i] : nullptr)
            .transpose();
  }
  return out;
}

void encode_questions_backward(const EncodedQuestions& encoded, const Matrix& d_text,
                               const Model& model, ParamSet& grads) {
  for (std::size_t i = 0; i < encoded.caches.size(); ++i) {
    encode_question_backward(encoded.caches[i],
                             d_text.row(static_cast<Eigen::Index>(i)).transpose(),
                             model.params, grads);
  }
}

ForwardResult forward(std::span<const Image* const> images,
                      std::span<const std::string> texts, const Model& model) {
  if (images.size() != texts.size() || images.empty()) {
    throw UsageError("forward needs equally sized, non-empty image and text batches");
  }
  const auto visual = encode_images(images, model, false);
  const auto text = encode_questions(texts, model, false);
  ForwardResult out;
  out.fused = fuse(visual.visual, text.text, model.params);
  out.logits = classify(out.fused, model.params);
  return out;
}

std::vector<int> predict(const Matrix& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    logits.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace rsvqa
