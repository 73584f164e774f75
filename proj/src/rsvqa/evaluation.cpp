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

#include "rsvqa/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <unordered_map>

#include "json.hpp"
#include "rsvqa/errors.hpp"

namespace rsvqa {

using nlohmann::json;

namespace {

std::string fixed4(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", v);
  return buffer;
}

std::optional<double> type_accuracy(const MetricsReport& report, QuestionType type) {
  auto it = report.per_type.find(type);
  if (it == report.per_type.end()) return std::nullopt;
  return it->second.accuracy();
}

bool passes(const QuestionRecord& q, QuestionFilter filter) {
  switch (filter) {
    case QuestionFilter::kOriginalsOnly: return q.is_original();
    case QuestionFilter::kParaphrasesOnly: return !q.is_original();
    case QuestionFilter::kAll: return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(QuestionFilter filter) {
  switch (filter) {
    case QuestionFilter::kOriginalsOnly: return "originals_only";
    case QuestionFilter::kParaphrasesOnly: return "paraphrases_only";
    case QuestionFilter::kAll: return "all";
  }
  return "?";
}

QuestionFilter parse_question_filter(std::string_view text) {
  if (text == "originals_only") return QuestionFilter::kOriginalsOnly;
  if (text == "paraphrases_only") return QuestionFilter::kParaphrasesOnly;
  if (text == "all") return QuestionFilter::kAll;
  throw UsageError("unknown question filter '" + std::string(text) + "'");
}

std::int64_t MetricsReport::correct() const {
  std::int64_t n = 0;
  for (const auto& [type, s] : per_type) n += s.correct;
  return n;
}

std::int64_t MetricsReport::total() const {
  std::int64_t n = 0;
  for (const auto& [type, s] : per_type) n += s.total;
  return n;
}

MetricsReport score(const PredictionSet& predictions, std::string setting) {
  if (predictions.empty()) throw DataError("cannot score an empty prediction set");
  MetricsReport report;
  report.setting = std::move(setting);
  for (const auto& p : predictions) {
    TypeScore& s = report.per_type[p.type];
    ++s.total;
    if (p.gold_in_pool && p.predicted == p.gold) ++s.correct;
    if (!p.gold_in_pool) ++report.out_of_pool;
  }
  double accuracy_sum = 0.0;
  for (const auto& [type, s] : report.per_type) accuracy_sum += s.accuracy();
  report.average_accuracy = accuracy_sum / static_cast<double>(report.per_type.size());
  report.overall_accuracy =
      static_cast<double>(report.correct()) / static_cast<double>(report.total());
  return report;
}

PredictionSet evaluate_model(const Model& model, const VQACorpus& corpus, Split split,
                             QuestionFilter filter, const ImageStore* images) {
  ImageStore loaded;
  if (!images) {
    loaded = ImageStore::load(corpus, split);
    images = &loaded;
  }
  const auto splits = image_splits(corpus);

  // Questions grouped by image so each image is encoded once.
  std::map<std::int64_t, std::vector<const QuestionRecord*>> by_image;
  std::vector<const QuestionRecord*> selected;
  for (const auto& q : corpus.questions) {
    auto it = splits.find(q.img_id);
    if (it == splits.end() || it->second != split || !passes(q, filter)) continue;
    by_image[q.img_id].push_back(&q);
    selected.push_back(&q);
  }

  std::unordered_map<std::int64_t, Prediction> results;
  for (const auto& [img_id, questions] : by_image) {
    const auto image = images->get(img_id);
    const Vector visual = encode_image(*image, model.params, model.dims);
    std::vector<std::string> texts;
    for (const auto* q : questions) texts.push_back(q->text);
    const auto encoded = encode_questions(texts, model, false);
    const Matrix visual_rows = visual.transpose().replicate(encoded.text.rows(), 1);
    const Matrix logits = classify(fuse(visual_rows, encoded.text, model.params), model.params);
    const auto best = predict(logits);
    for (std::size_t i = 0; i < questions.size(); ++i) {
      const QuestionRecord& q = *questions[i];
      Prediction p;
      p.question_id = q.id;
      p.predicted = model.answers.answer(best[i]);
      p.gold = q.answer;
      p.type = q.type;
      p.gold_in_pool = model.answers.find(q.answer).has_value();
      results.emplace(q.id, std::move(p));
    }
  }

  PredictionSet out;
  out.reserve(selected.size());
  for (const auto* q : selected) out.push_back(results.at(q->id));
  return out;
}

std::vector<MetricsReport> run_setting_matrix(
    const std::map<std::string, const Model*>& models,
    const std::map<std::string, const VQACorpus*>& corpora, Split split) {
  for (const char* label : {"original", "augmented"}) {
    if (!models.count(label) || !models.at(label)) {
      throw UsageError(std::string("setting matrix is missing the '") + label + "' model");
    }
    if (!corpora.count(label) || !corpora.at(label)) {
      throw UsageError(std::string("setting matrix is missing the '") + label + "' corpus");
    }
  }
  const std::pair<const char*, const char*> settings[] = {
      {"original", "original"}, {"original", "augmented"}, {"augmented", "augmented"}};
  std::vector<MetricsReport> reports;
  for (const auto& [train_label, test_label] : settings) {
    const auto predictions = evaluate_model(*models.at(train_label),
                                            *corpora.at(test_label), split,
                                            QuestionFilter::kAll);
    reports.push_back(
        score(predictions, std::string(train_label) + "->" + std::string(test_label)));
  }
  return reports;
}

std::string report_to_json(const MetricsReport& report) {
  json per_type = json::object();
  for (const auto& [type, s] : report.per_type) {
    per_type[std::string(to_string(type))] =
        json{{"correct", s.correct}, {"total", s.total}, {"accuracy", s.accuracy()}};
  }
  json doc{{"setting", report.setting},
           {"per_type", per_type},
           {"AA", report.average_accuracy},
           {"OA", report.overall_accuracy},
           {"out_of_pool", report.out_of_pool}};
  return doc.dump(2) + "\n";
}

MetricsReport report_from_json(std::string_view text) {
  MetricsReport report;
  try {
    const json doc = json::parse(text);
    report.setting = doc.at("setting").get<std::string>();
    for (const auto& [key, entry] : doc.at("per_type").items()) {
      TypeScore s;
      s.correct = entry.at("correct").get<std::int64_t>();
      s.total = entry.at("total").get<std::int64_t>();
      if (s.total < 1 || s.correct < 0 || s.correct > s.total) {
        throw DataError("report entry '" + key + "' has inconsistent counts");
      }
      report.per_type[parse_question_type(key)] = s;
    }
    report.average_accuracy = doc.at("AA").get<double>();
    report.overall_accuracy = doc.at("OA").get<double>();
    report.out_of_pool = doc.value("out_of_pool", std::int64_t{0});
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

std::string render_markdown(const std::vector<MetricsReport>& reports) {
  std::string out = "| Type |";
  std::string rule = "|---|";
  for (const auto& r : reports) {
    out += ' ' + r.setting + " |";
    rule += "---|";
  }
  out += '\n' + rule + '\n';
  auto row = [&](std::string_view label, auto value_of) {
    out += "| " + std::string(label) + " |";
    for (const auto& r : reports) {
      const std::optional<double> v = value_of(r);
      out += ' ' + (v ? fixed4(*v) : std::string("-")) + " |";
    }
    out += '\n';
  };
  for (auto type : kAllQuestionTypes) {
    row(display_name(type), [&](const MetricsReport& r) { return type_accuracy(r, type); });
  }
  row("AA", [](const MetricsReport& r) { return std::optional(r.average_accuracy); });
  row("OA", [](const MetricsReport& r) { return std::optional(r.overall_accuracy); });
  return out;
}

std::string render_csv(const std::vector<MetricsReport>& reports) {
  std::string out = "type";
  for (const auto& r : reports) out += ',' + r.setting;
  out += '\n';
  auto row = [&](std::string_view label, auto value_of) {
    out += std::string(label);
    for (const auto& r : reports) {
      const std::optional<double> v = value_of(r);
      out += ',' + (v ? fixed4(*v) : std::string());
    }
    out += '\n';
  };
  for (auto type : kAllQuestionTypes) {
    row(display_name(type), [&](const MetricsReport& r) { return type_accuracy(r, type); });
  }
  row("AA", [](const MetricsReport& r) { return std::optional(r.average_accuracy); });
  row("OA", [](const MetricsReport& r) { return std::optional(r.overall_accuracy); });
  return out;
}

Image render_bar_chart(const MetricsReport& report) {
  constexpr int kWidth = 260, kHeight = 170, kLeft = 10, kBottom = 10, kTop = 10;
  constexpr int kBarWidth = 30, kGap = 10;
  const double colours[6][3] = {{0.27, 0.51, 0.71}, {0.87, 0.52, 0.18},
                                {0.35, 0.63, 0.35}, {0.78, 0.30, 0.30},
                                {0.45, 0.45, 0.45}, {0.15, 0.15, 0.15}};
  Image image(kHeight, kWidth, 3, 1.0);
  const int plot_height = kHeight - kTop - kBottom;
  auto y_of = [&](double v) { return kTop + static_cast<int>(std::lround((1.0 - v) * plot_height)); };

  for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const int y = y_of(tick);
    for (int x = kLeft; x < kWidth - kLeft; ++x) {
      for (int c = 0; c < 3; ++c) image.at(y, x, c) = tick == 0.0 ? 0.0 : 0.85;
    }
  }
  std::vector<std::optional<double>> values;
  for (auto type : kAllQuestionTypes) values.push_back(type_accuracy(report, type));
  values.emplace_back(report.average_accuracy);
  values.emplace_back(report.overall_accuracy);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    const double v = std::clamp(*values[i], 0.0, 1.0);
    const int x0 = kLeft + kGap + static_cast<int>(i) * (kBarWidth + kGap);
    for (int y = y_of(v); y < y_of(0.0); ++y) {
      for (int x = x0; x < x0 + kBarWidth; ++x) {
        for (int c = 0; c < 3; ++c) image.at(y, x, c) = colours[i][c];
      }
    }
  }
  return image;
}

}  // namespace rsvqa
