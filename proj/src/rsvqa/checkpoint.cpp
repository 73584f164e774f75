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

#include "rsvqa/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rsvqa/errors.hpp"

namespace rsvqa {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "rsvqa-checkpoint";
constexpr int kVersion = 1;

json dims_to_json(const ModelDims& d) {
  return json{{"image_size", d.image_size},
              {"image_channels", d.image_channels},
              {"conv_channels", d.conv_channels},
              {"visual_dim", d.visual_dim},
              {"embed_dim", d.embed_dim},
              {"text_dim", d.text_dim},
              {"fused_dim", d.fused_dim},
              {"max_question_len", d.max_question_len},
              {"vocab_size", d.vocab_size},
              {"num_answers", d.num_answers}};
}

ModelDims dims_from_json(const json& j) {
  ModelDims d;
  d.image_size = j.at("image_size").get<int>();
  d.image_channels = j.at("image_channels").get<int>();
  d.conv_channels = j.at("conv_channels").get<std::array<int, 3>>();
  d.visual_dim = j.at("visual_dim").get<int>();
  d.embed_dim = j.at("embed_dim").get<int>();
  d.text_dim = j.at("text_dim").get<int>();
  d.fused_dim = j.at("fused_dim").get<int>();
  d.max_question_len = j.at("max_question_len").get<int>();
  d.vocab_size = j.at("vocab_size").get<int>();
  d.num_answers = j.at("num_answers").get<int>();
  return d;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
  const Model& model = checkpoint.model;
  json params = json::object();
  for (const auto& [key, value] : model.params) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(value.size()));
    for (Eigen::Index r = 0; r < value.rows(); ++r) {
      for (Eigen::Index c = 0; c < value.cols(); ++c) data.push_back(value(r, c));
    }
    params[key] = json{{"shape", {value.rows(), value.cols()}}, {"data", std::move(data)}};
  }
  json doc{{"format", kFormat},
           {"version", kVersion},
           {"dims", dims_to_json(model.dims)},
           {"text_vocab", model.text_vocab.tokens()},
           {"answers", model.answers.answers()},
           {"info", checkpoint.info},
           {"params", std::move(params)}};
  return doc.dump() + "\n";
}

Checkpoint checkpoint_from_json(std::string_view text) {
  Checkpoint out;
  try {
    const json doc = json::parse(text);
    if (doc.value("format", std::string()) != kFormat) {
      throw DataError("not an rsvqa checkpoint");
    }
    if (doc.at("version").get<int>() != kVersion) {
      throw DataError("unsupported checkpoint version " + doc.at("version").dump());
    }
    Model& model = out.model;
    model.dims = dims_from_json(doc.at("dims"));
    auto tokens = doc.at("text_vocab").get<std::vector<std::string>>();
    if (tokens.size() < 2 || tokens[0] != TextVocab::kPadToken ||
        tokens[1] != TextVocab::kUnkToken) {
      throw DataError("checkpoint text vocabulary lacks the reserved tokens");
    }
    model.text_vocab = TextVocab::from_tokens({tokens.begin() + 2, tokens.end()});
    model.answers = AnswerVocabulary(doc.at("answers").get<std::vector<std::string>>());
    out.info = doc.value("info", std::map<std::string, std::string>{});
    for (const auto& [key, entry] : doc.at("params").items()) {
      const auto shape = entry.at("shape").get<std::array<Eigen::Index, 2>>();
      const auto data = entry.at("data").get<std::vector<double>>();
      if (shape[0] < 0 || shape[1] < 0 ||
          static_cast<std::size_t>(shape[0] * shape[1]) != data.size()) {
        throw DataError("parameter '" + key + "' has inconsistent shape and data");
      }
      Matrix value(shape[0], shape[1]);
      std::size_t i = 0;
      for (Eigen::Index r = 0; r < shape[0]; ++r) {
        for (Eigen::Index c = 0; c < shape[1]; ++c) value(r, c) = data[i++];
      }
      model.params.emplace(key, std::move(value));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }

  const Model& model = out.model;
  if (static_cast<int>(model.text_vocab.size()) != model.dims.vocab_size ||
      static_cast<int>(model.answers.size()) != model.dims.num_answers) {
    throw DataError("checkpoint vocabularies disagree with recorded dims");
  }
  const ParamSet expected = init_params(model.dims, 0);
  for (const auto& [key, value] : expected) {
    auto it = model.params.find(key);
    if (it == model.params.end()) throw DataError("checkpoint lacks parameter '" + key + "'");
    if (it->second.rows() != value.rows() || it->second.cols() != value.cols()) {
      throw DataError("checkpoint parameter '" + key + "' has the wrong shape");
    }
  }
  if (model.params.size() != expected.size()) {
    throw DataError("checkpoint has unexpected extra parameters");
  }
  return out;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ExternalError("cannot open '" + path.string() + "' for writing");
  out << checkpoint_to_json(checkpoint);
  if (!out) throw ExternalError("failed writing '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return checkpoint_from_json(buffer.str());
}

std::string inspect_checkpoint(const Checkpoint& checkpoint) {
  const Model& model = checkpoint.model;
  std::ostringstream out;
  out << "text_vocab " << model.text_vocab.size() << " tokens\n"
      << "answers " << model.answers.size() << " entries\n";
  for (const auto& [key, value] : checkpoint.info) out << "info." << key << ' ' << value << '\n';
  std::size_t total = 0;
  for (const auto& [key, value] : model.params) {
    out << key << ' ' << value.rows() << 'x' << value.cols() << '\n';
    total += static_cast<std::size_t>(value.size());
  }
  out << "total_parameters " << total << '\n';
  return out.str();
}

}  // namespace rsvqa
