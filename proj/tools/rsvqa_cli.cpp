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

// rsvqa command-line front end. Talks to the toolkit only through the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsvqa/rsvqa.h"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 ok, 1 usage, 2 data, 3 runtime or external failure.
int exit_code(rsvqa_status status) {
  switch (status) {
    case RSVQA_OK: return 0;
    case RSVQA_ERR_USAGE: return 1;
    case RSVQA_ERR_DATA: return 2;
    default: return 3;
  }
}

struct Failure {
  int code;
};

void check(rsvqa_status status) {
  if (status == RSVQA_OK) return;
  std::cerr << "rsvqa: " << rsvqa_last_error() << '\n';
  throw Failure{exit_code(status)};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "rsvqa: " << message << '\n';
  throw Failure{1};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Corpus = std::unique_ptr<rsvqa_corpus, Deleter<rsvqa_corpus, rsvqa_corpus_free>>;
using TranslatorHandle =
    std::unique_ptr<rsvqa_translator, Deleter<rsvqa_translator, rsvqa_translator_free>>;
using Config = std::unique_ptr<rsvqa_config, Deleter<rsvqa_config, rsvqa_config_free>>;
using CheckpointHandle =
    std::unique_ptr<rsvqa_checkpoint, Deleter<rsvqa_checkpoint, rsvqa_checkpoint_free>>;

void free_string(char* s) { rsvqa_string_free(s); }
using OwnedString = std::unique_ptr<char, Deleter<char, free_string>>;

std::string take(char* s) {
  OwnedString owned(s);
  return owned ? std::string(owned.get()) : std::string();
}

Corpus load_corpus(const std::string& path) {
  rsvqa_corpus* raw = nullptr;
  check(rsvqa_corpus_load(path.c_str(), &raw));
  return Corpus(raw);
}

CheckpointHandle load_checkpoint(const std::string& path) {
  rsvqa_checkpoint* raw = nullptr;
  check(rsvqa_checkpoint_load(path.c_str(), &raw));
  return CheckpointHandle(raw);
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    std::cerr << "rsvqa: cannot create directory '" << dir.string() << "'\n";
    throw Failure{3};
  }
}

void ensure_parent(const std::string& file) { ensure_dir(fs::path(file).parent_path()); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    std::cerr << "rsvqa: cannot write '" << path.string() << "'\n";
    throw Failure{3};
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "rsvqa: cannot read '" << path.string() << "'\n";
    throw Failure{2};
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// --- synth -------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  int images = 200;
  int image_size = 32;
  std::uint64_t seed = 42;
  bool no_paraphrases = false;
};

void add_synth(CLI::App& app, SynthArgs& a) {
  auto* cmd = app.add_subcommand("synth", "Generate the synthetic shape benchmark");
  cmd->add_option("--out", a.out, "Output directory (corpus.json and images/)")->required();
  cmd->add_option("--images", a.images, "Number of images")->capture_default_str();
  cmd->add_option("--image-size", a.image_size, "Image side in pixels (multiple of 8)")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Generator seed")->capture_default_str();
  cmd->add_flag("--no-paraphrases", a.no_paraphrases, "Skip the rule paraphrases");
}

int run_synth(const SynthArgs& a) {
  ensure_dir(a.out);
  rsvqa_synth_options options;
  rsvqa_synth_options_init(&options);
  options.n_images = a.images;
  options.image_size = a.image_size;
  options.seed = a.seed;
  options.with_paraphrases = a.no_paraphrases ? 0 : 1;
  rsvqa_corpus* raw = nullptr;
  check(rsvqa_synth_generate(&options, a.out.c_str(), &raw));
  Corpus corpus(raw);
  int64_t images = 0, questions = 0, originals = 0;
  check(rsvqa_corpus_counts(corpus.get(), &images, &questions, &originals));
  std::cout << "wrote " << images << " images, " << questions << " questions (" << originals
            << " originals) to " << a.out << '\n';
  return 0;
}

// --- augment -----------------------------------------------------------------

struct AugmentArgs {
  std::string input, output, pivots = "zh,de,fr", translator = "mock";
  std::string endpoint, cache, token, drop_report;
  std::vector<std::string> pivot_endpoints;
  double timeout = 10.0;
  int retries = 3;
  int backoff_ms = 200;
  int concurrency = 4;
  std::int64_t id_base = 0;
  bool no_dedup_normalize = false, no_dedup_original = false, no_dedup_pivots = false;
  CLI::Option* id_base_opt = nullptr;
};

void add_augment(CLI::App& app, AugmentArgs& a) {
  auto* cmd = app.add_subcommand("augment", "Add back-translated paraphrases to a corpus");
  cmd->add_option("--input", a.input, "Input corpus JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--output", a.output, "Output corpus JSON")->required();
  cmd->add_option("--pivots", a.pivots, "Comma-separated pivot languages")->capture_default_str();
  cmd->add_option("--translator", a.translator, "Translation backend")
      ->check(CLI::IsMember({"mock", "http"}))
      ->capture_default_str();
  cmd->add_option("--endpoint", a.endpoint,
                  "HTTP translation endpoint (default: $MT_ENDPOINT, then "
                  "http://127.0.0.1:5000)");
  cmd->add_option("--pivot-endpoint", a.pivot_endpoints,
                  "Per-pivot endpoint override, pivot=url (repeatable)");
  cmd->add_option("--cache", a.cache, "JSON-lines translation cache file");
  cmd->add_option("--timeout", a.timeout, "Per-request timeout in seconds")
      ->capture_default_str();
  cmd->add_option("--retries", a.retries, "Extra attempts after a failed request")
      ->capture_default_str();
  cmd->add_option("--backoff-ms", a.backoff_ms, "Initial retry backoff, doubled per retry")
      ->capture_default_str();
  cmd->add_option("--token", a.token, "Bearer token sent to the translation service");
  cmd->add_option("--concurrency", a.concurrency, "Maximum concurrent translation requests")
      ->capture_default_str();
  a.id_base_opt = cmd->add_option("--id-base", a.id_base,
                                  "First id for new questions (default: max id + 1)");
  cmd->add_option("--drop-report", a.drop_report, "Write the per-pivot drop report JSON here");
  cmd->add_flag("--no-dedup-normalize", a.no_dedup_normalize,
                "Compare paraphrases verbatim instead of after normalization");
  cmd->add_flag("--no-dedup-original", a.no_dedup_original,
                "Keep paraphrases equal to their original");
  cmd->add_flag("--no-dedup-pivots", a.no_dedup_pivots,
                "Keep paraphrases equal to another pivot's paraphrase");
}

int run_augment(const AugmentArgs& a) {
  if (a.pivots.find_first_not_of(" ,\t") == std::string::npos) {
    usage_error("--pivots must name at least one pivot language");
  }
  ensure_parent(a.output);
  if (!a.drop_report.empty()) ensure_parent(a.drop_report);
  if (!a.cache.empty()) ensure_parent(a.cache);

  Corpus input = load_corpus(a.input);

  std::string pivot_endpoints;
  for (const auto& item : a.pivot_endpoints) {
    if (!pivot_endpoints.empty()) pivot_endpoints += ',';
    pivot_endpoints += item;
  }
  rsvqa_translator_options topts;
  rsvqa_translator_options_init(&topts);
  topts.kind = a.translator == "http" ? RSVQA_TRANSLATOR_HTTP : RSVQA_TRANSLATOR_MOCK;
  topts.endpoint = a.endpoint.empty() ? nullptr : a.endpoint.c_str();
  topts.pivot_endpoints = pivot_endpoints.empty() ? nullptr : pivot_endpoints.c_str();
  topts.timeout_seconds = a.timeout;
  topts.retries = a.retries;
  topts.backoff_ms = a.backoff_ms;
  topts.bearer_token = a.token.empty() ? nullptr : a.token.c_str();
  topts.cache_path = a.cache.empty() ? nullptr : a.cache.c_str();
  rsvqa_translator* traw = nullptr;
  check(rsvqa_translator_create(&topts, &traw));
  TranslatorHandle translator(traw);

  rsvqa_augment_options aopts;
  rsvqa_augment_options_init(&aopts);
  aopts.pivots = a.pivots.c_str();
  aopts.dedup_normalize = a.no_dedup_normalize ? 0 : 1;
  aopts.dedup_equal_original = a.no_dedup_original ? 0 : 1;
  aopts.dedup_across_pivots = a.no_dedup_pivots ? 0 : 1;
  aopts.has_id_base = a.id_base_opt->count() > 0 ? 1 : 0;
  aopts.id_base = a.id_base;
  aopts.max_concurrency = a.concurrency;

  rsvqa_corpus* oraw = nullptr;
  char* report = nullptr;
  check(rsvqa_augment(input.get(), translator.get(), &aopts, &oraw, &report));
  Corpus output(oraw);
  const std::string drop_report = take(report);
  check(rsvqa_corpus_save(output.get(), a.output.c_str()));
  if (!a.drop_report.empty()) write_text(a.drop_report, drop_report);

  int64_t before = 0, after = 0;
  check(rsvqa_corpus_counts(input.get(), nullptr, &before, nullptr));
  check(rsvqa_corpus_counts(output.get(), nullptr, &after, nullptr));
  std::cout << "questions: " << before << " -> " << after << '\n';
  std::cout << "drop report: " << drop_report;
  if (drop_report.empty() || drop_report.back() != '\n') std::cout << '\n';
  return 0;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  std::string data, config, mode, out;
  std::vector<std::string> overrides;
  bool quiet = false;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* cmd = app.add_subcommand("train", "Train a model on a corpus");
  cmd->add_option("--data", a.data, "Corpus JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--config", a.config, "Training config file (default: desk profile)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--mode", a.mode, "Override the config mode")
      ->check(CLI::IsMember({"baseline", "contrastive"}));
  cmd->add_option("--set", a.overrides, "Override one config key, key=value (repeatable)");
  cmd->add_option("--out", a.out, "Output directory (checkpoint.json, history.csv)")
      ->required();
  cmd->add_flag("--quiet", a.quiet, "Do not print per-epoch progress");
}

void print_epoch(const rsvqa_epoch_record* r, void*) {
  std::fprintf(stderr,
               "epoch %3d  total %.4f  ce_a %.4f  ce_p %.4f  triplet %.4f  val_oa %.4f\n",
               r->epoch, r->total, r->ce_original, r->ce_paraphrase, r->triplet, r->val_oa);
}

int run_train(const TrainArgs& a) {
  rsvqa_config* craw = nullptr;
  if (a.config.empty()) {
    check(rsvqa_config_desk(&craw));
  } else {
    check(rsvqa_config_load(a.config.c_str(), &craw));
  }
  Config config(craw);
  if (!a.mode.empty()) check(rsvqa_config_set(config.get(), "mode", a.mode.c_str()));
  for (const auto& item : a.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) usage_error("--set expects key=value, got '" + item + "'");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    check(rsvqa_config_set(config.get(), trim(item.substr(0, eq)).c_str(),
                           trim(item.substr(eq + 1)).c_str()));
  }
  ensure_dir(a.out);
  Corpus corpus = load_corpus(a.data);

  rsvqa_checkpoint* kraw = nullptr;
  char* history = nullptr;
  check(rsvqa_train(corpus.get(), config.get(), a.quiet ? nullptr : print_epoch, nullptr, &kraw,
                    &history));
  CheckpointHandle checkpoint(kraw);
  const std::string csv = take(history);
  const fs::path out(a.out);
  check(rsvqa_checkpoint_save(checkpoint.get(), (out / "checkpoint.json").string().c_str()));
  write_text(out / "history.csv", csv);
  char* text = nullptr;
  check(rsvqa_config_to_string(config.get(), &text));
  write_text(out / "config.cfg", take(text));
  std::cout << "wrote " << (out / "checkpoint.json").string() << " and "
            << (out / "history.csv").string() << '\n';
  return 0;
}

// --- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
  std::string checkpoint, data, split = "test", filter = "all", setting, out;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  auto* cmd = app.add_subcommand("evaluate", "Score a checkpoint on one split of a corpus");
  cmd->add_option("--checkpoint", a.checkpoint, "Checkpoint JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--data", a.data, "Corpus JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--split", a.split, "Split to score")
      ->check(CLI::IsMember({"train", "val", "test"}))
      ->capture_default_str();
  cmd->add_option("--filter", a.filter, "Questions to score")
      ->check(CLI::IsMember({"all", "originals_only", "paraphrases_only"}))
      ->capture_default_str();
  cmd->add_option("--setting", a.setting, "Label stored in the report");
  cmd->add_option("--out", a.out, "Report JSON path (default: stdout)");
}

int run_evaluate(const EvaluateArgs& a) {
  if (!a.out.empty()) ensure_parent(a.out);
  CheckpointHandle checkpoint = load_checkpoint(a.checkpoint);
  Corpus corpus = load_corpus(a.data);
  char* report = nullptr;
  check(rsvqa_evaluate(checkpoint.get(), corpus.get(), a.split.c_str(), a.filter.c_str(),
                       a.setting.empty() ? nullptr : a.setting.c_str(), &report));
  const std::string json = take(report);
  if (a.out.empty()) {
    std::cout << json;
  } else {
    write_text(a.out, json);
  }
  return 0;
}

// --- matrix ------------------------------------------------------------------

struct MatrixArgs {
  std::string original_checkpoint, augmented_checkpoint, original_data, augmented_data;
  std::string split = "test", out;
};

void add_matrix(CLI::App& app, MatrixArgs& a) {
  auto* cmd = app.add_subcommand(
      "matrix", "Score the original->original, original->augmented and "
                "augmented->augmented settings");
  cmd->add_option("--original-checkpoint", a.original_checkpoint,
                  "Model trained on the original corpus")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--augmented-checkpoint", a.augmented_checkpoint,
                  "Model trained on the augmented corpus")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--original-data", a.original_data, "Original corpus JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--augmented-data", a.augmented_data, "Augmented corpus JSON")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--split", a.split, "Split to score")
      ->check(CLI::IsMember({"train", "val", "test"}))
      ->capture_default_str();
  cmd->add_option("--out", a.out, "Reports JSON array path (default: stdout)");
}

int run_matrix(const MatrixArgs& a) {
  if (!a.out.empty()) ensure_parent(a.out);
  CheckpointHandle original_model = load_checkpoint(a.original_checkpoint);
  CheckpointHandle augmented_model = load_checkpoint(a.augmented_checkpoint);
  Corpus original = load_corpus(a.original_data);
  Corpus augmented = load_corpus(a.augmented_data);
  char* reports = nullptr;
  check(rsvqa_setting_matrix(original_model.get(), augmented_model.get(), original.get(),
                             augmented.get(), a.split.c_str(), &reports));
  const std::string json = take(reports);
  if (a.out.empty()) {
    std::cout << json;
  } else {
    write_text(a.out, json);
  }
  return 0;
}

// --- report ------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string markdown, csv, charts;
};

void add_report(CLI::App& app, ReportArgs& a) {
  auto* cmd = app.add_subcommand("report", "Render report JSONs as tables and charts");
  cmd->add_option("--inputs", a.inputs, "Report JSON files, one table column each")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--markdown", a.markdown, "Markdown table path");
  cmd->add_option("--csv", a.csv, "CSV table path");
  cmd->add_option("--charts", a.charts, "Directory for one PNG bar chart per report");
}

int run_report(const ReportArgs& a) {
  if (!a.markdown.empty()) ensure_parent(a.markdown);
  if (!a.csv.empty()) ensure_parent(a.csv);
  if (!a.charts.empty()) ensure_dir(a.charts);

  std::vector<std::string> texts;
  for (const auto& path : a.inputs) texts.push_back(read_text(path));
  std::vector<const char*> pointers;
  for (const auto& t : texts) pointers.push_back(t.c_str());

  auto render = [&](const char* format) {
    char* out = nullptr;
    check(rsvqa_report_render(pointers.data(), pointers.size(), format, &out));
    return take(out);
  };
  const std::string markdown = render("markdown");
  const std::string csv = render("csv");
  if (!a.markdown.empty()) write_text(a.markdown, markdown);
  if (!a.csv.empty()) write_text(a.csv, csv);
  if (!a.charts.empty()) {
    for (std::size_t i = 0; i < texts.size(); ++i) {
      const fs::path png = fs::path(a.charts) / (fs::path(a.inputs[i]).stem().string() + ".png");
      check(rsvqa_report_chart(texts[i].c_str(), png.string().c_str()));
    }
  }
  if (a.markdown.empty() && a.csv.empty()) std::cout << markdown;
  return 0;
}

// --- checkpoint inspect ------------------------------------------------------

struct InspectArgs {
  std::string path;
};

void add_checkpoint(CLI::App& app, InspectArgs& a) {
  auto* cmd = app.add_subcommand("checkpoint", "Checkpoint utilities");
  cmd->require_subcommand(1);
  auto* inspect = cmd->add_subcommand("inspect", "Print every parameter key and shape");
  inspect->add_option("path", a.path, "Checkpoint JSON")->required()->check(CLI::ExistingFile);
}

int run_inspect(const InspectArgs& a) {
  CheckpointHandle checkpoint = load_checkpoint(a.path);
  char* text = nullptr;
  check(rsvqa_checkpoint_inspect(checkpoint.get(), &text));
  std::cout << take(text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rsvqa: paraphrase-robust visual question answering toolkit", "rsvqa"};
  app.set_version_flag("--version", rsvqa_version());
  app.require_subcommand(1);

  SynthArgs synth;
  AugmentArgs augment;
  TrainArgs train;
  EvaluateArgs evaluate;
  MatrixArgs matrix;
  ReportArgs report;
  InspectArgs inspect;
  add_synth(app, synth);
  add_augment(app, augment);
  add_train(app, train);
  add_evaluate(app, evaluate);
  add_matrix(app, matrix);
  add_report(app, report);
  add_checkpoint(app, inspect);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("synth")) return run_synth(synth);
    if (app.got_subcommand("augment")) return run_augment(augment);
    if (app.got_subcommand("train")) return run_train(train);
    if (app.got_subcommand("evaluate")) return run_evaluate(evaluate);
    if (app.got_subcommand("matrix")) return run_matrix(matrix);
    if (app.got_subcommand("report")) return run_report(report);
    if (app.got_subcommand("checkpoint")) return run_inspect(inspect);
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "rsvqa: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
