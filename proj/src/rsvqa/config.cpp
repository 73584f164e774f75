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

#include "rsvqa/config.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rsvqa/errors.hpp"

namespace rsvqa {
namespace {

constexpr std::array<std::string_view, 8> kRequiredKeys = {
    "learning_rate", "batch_size", "epochs",          "margin",
    "mode",          "seed",       "negative_scheme", "max_question_len"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw UsageError("config key '" + std::string(key) + "': cannot parse '" +
                     std::string(value) + "'");
  }
  return out;
}

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int precision = 1; precision < 17; ++precision) {
    char shorter[64];
    std::snprintf(shorter, sizeof(shorter), "%.*g", precision, v);
    double back = 0.0;
    std::from_chars(shorter, shorter + std::char_traits<char>::length(shorter), back);
    if (back == v) return shorter;
  }
  return buffer;
}

}  // namespace

std::string_view to_string(TrainMode mode) {
  return mode == TrainMode::kBaseline ? "baseline" : "contrastive";
}

std::string_view to_string(NegativeScheme scheme) {
  return scheme == NegativeScheme::kReverse ? "reverse" : "cyclic_shift";
}

TrainMode parse_train_mode(std::string_view text) {
  if (text == "baseline") return TrainMode::kBaseline;
  if (text == "contrastive") return TrainMode::kContrastive;
  throw UsageError("unknown training mode '" + std::string(text) + "'");
}

NegativeScheme parse_negative_scheme(std::string_view text) {
  if (text == "reverse") return NegativeScheme::kReverse;
  if (text == "cyclic_shift") return NegativeScheme::kCyclicShift;
  throw UsageError("unknown negative scheme '" + std::string(text) + "'");
}

TrainConfig TrainConfig::paper_profile() { return TrainConfig{}; }

TrainConfig TrainConfig::desk_profile() {
  TrainConfig config;
  config.learning_rate = 2e-3;
  config.batch_size = 32;
  config.epochs = 30;
  return config;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (batch_size < 1) throw UsageError("batch_size must be at least 1");
  if (epochs < 1) throw UsageError("epochs must be at least 1");
  if (!(margin >= 0.0)) throw UsageError("margin must be non-negative");
  dims.validate();
}

void TrainConfig::set(std::string_view key, std::string_view value) {
  if (key == "learning_rate") {
    learning_rate = parse_number<double>(key, value);
  } else if (key == "batch_size") {
    batch_size = parse_number<int>(key, value);
  } else if (key == "epochs") {
    epochs = parse_number<int>(key, value);
  } else if (key == "margin") {
    margin = parse_number<double>(key, value);
  } else if (key == "mode") {
    mode = parse_train_mode(value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "negative_scheme") {
    negative_scheme = parse_negative_scheme(value);
  } else if (key == "max_question_len") {
    dims.max_question_len = parse_number<int>(key, value);
  } else if (key == "dims.image_size") {
    dims.image_size = parse_number<int>(key, value);
  } else if (key == "dims.conv1") {
    dims.conv_channels[0] = parse_number<int>(key, value);
  } else if (key == "dims.conv2") {
    dims.conv_channels[1] = parse_number<int>(key, value);
  } else if (key == "dims.conv3") {
    dims.conv_channels[2] = parse_number<int>(key, value);
  } else if (key == "dims.visual") {
    dims.visual_dim = parse_number<int>(key, value);
  } else if (key == "dims.embed") {
    dims.embed_dim = parse_number<int>(key, value);
  } else if (key == "dims.text") {
    dims.text_dim = parse_number<int>(key, value);
  } else if (key == "dims.fused") {
    dims.fused_dim = parse_number<int>(key, value);
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

TrainConfig TrainConfig::parse(std::string_view text) {
  TrainConfig config = desk_profile();
  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.emplace(key).second) {
      throw UsageError("config key '" + std::string(key) + "' given twice");
    }
    config.set(key, value);
  }
  std::string missing;
  for (auto key : kRequiredKeys) {
    if (!seen.count(key)) missing += (missing.empty() ? "" : ", ") + std::string(key);
  }
  if (!missing.empty()) throw UsageError("config is missing required keys: " + missing);
  config.validate();
  return config;
}

TrainConfig TrainConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string TrainConfig::to_text() const {
  std::ostringstream out;
  out << "learning_rate = " << format_double(learning_rate) << '\n'
      << "batch_size = " << batch_size << '\n'
      << "epochs = " << epochs << '\n'
      << "margin = " << format_double(margin) << '\n'
      << "mode = " << to_string(mode) << '\n'
      << "seed = " << seed << '\n'
      << "negative_scheme = " << to_string(negative_scheme) << '\n'
      << "max_question_len = " << dims.max_question_len << '\n'
      << "dims.image_size = " << dims.image_size << '\n'
      << "dims.conv1 = " << dims.conv_channels[0] << '\n'
      << "dims.conv2 = " << dims.conv_channels[1] << '\n'
      << "dims.conv3 = " << dims.conv_channels[2] << '\n'
      << "dims.visual = " << dims.visual_dim << '\n'
      << "dims.embed = " << dims.embed_dim << '\n'
      << "dims.text = " << dims.text_dim << '\n'
      << "dims.fused = " << dims.fused_dim << '\n';
  return out.str();
}

}  // namespace rsvqa
