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

#include "rsvqa/rsvqa.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rsvqa/augmentation.hpp"
#include "rsvqa/checkpoint.hpp"
#include "rsvqa/config.hpp"
#include "rsvqa/corpus.hpp"
#include "rsvqa/errors.hpp"
#include "rsvqa/evaluation.hpp"
#include "rsvqa/synth.hpp"
#include "rsvqa/training.hpp"
#include "rsvqa/translator.hpp"

struct rsvqa_corpus {
  rsvqa::VQACorpus corpus;
};

struct rsvqa_translator {
  std::shared_ptr<rsvqa::Translator> translator;  // outermost layer
  std::shared_ptr<rsvqa::HttpTranslator> http;    // null for the mock
  std::shared_ptr<rsvqa::TranslationCache> cache;
};

struct rsvqa_config {
  rsvqa::TrainConfig config;
};

struct rsvqa_checkpoint {
  rsvqa::Checkpoint checkpoint;
};

namespace {

thread_local std::string g_last_error;

rsvqa_status fail(rsvqa_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
rsvqa_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return RSVQA_OK;
  } catch (const rsvqa::Error& e) {
    return fail(static_cast<rsvqa_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RSVQA_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(RSVQA_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(RSVQA_ERR_RUNTIME, "unknown error");
  }
}

void require(const void* pointer, const char* name) {
  if (!pointer) throw rsvqa::UsageError(std::string(name) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    out.push_back(item.substr(first, item.find_last_not_of(" \t") - first + 1));
  }
  return out;
}

std::map<std::string, std::string> parse_pivot_endpoints(const char* text) {
  std::map<std::string, std::string> out;
  if (!text) return out;
  for (const auto& item : split_list(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw rsvqa::UsageError("pivot endpoint '" + item + "' is not of the form pivot=url");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

}  // namespace

extern "C" {

const char* rsvqa_version(void) { return RSVQA_VERSION; }

const char* rsvqa_last_error(void) { return g_last_error.c_str(); }

void rsvqa_string_free(char* s) { std::free(s); }

rsvqa_status rsvqa_corpus_load(const char* path, rsvqa_corpus** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new rsvqa_corpus{rsvqa::load_corpus(path)};
  });
}

rsvqa_status rsvqa_corpus_save(const rsvqa_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus, "corpus");
    require(path, "path");
    const std::filesystem::path target(path);
    rsvqa::save_corpus(rsvqa::rebase_corpus(corpus->corpus, target.parent_path()), target);
  });
}

void rsvqa_corpus_free(rsvqa_corpus* corpus) { delete corpus; }

rsvqa_status rsvqa_corpus_counts(const rsvqa_corpus* corpus, int64_t* images,
                                 int64_t* questions, int64_t* originals) {
  return guarded([&] {
    require(corpus, "corpus");
    const auto& c = corpus->corpus;
    if (images) *images = static_cast<int64_t>(c.images.size());
    if (questions) *questions = static_cast<int64_t>(c.questions.size());
    if (originals) {
      int64_t n = 0;
      for (const auto& q : c.questions) n += q.is_original() ? 1 : 0;
      *originals = n;
    }
  });
}

rsvqa_status rsvqa_corpus_originals_only(const rsvqa_corpus* corpus, rsvqa_corpus** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    *out = new rsvqa_corpus{rsvqa::originals_only(corpus->corpus)};
  });
}

void rsvqa_synth_options_init(rsvqa_synth_options* options) {
  if (!options) return;
  const rsvqa::synth::SynthConfig defaults;
  options->n_images = defaults.n_images;
  options->image_size = defaults.image_size;
  options->seed = defaults.seed;
  options->with_paraphrases = 1;
}

rsvqa_status rsvqa_synth_generate(const rsvqa_synth_options* options, const char* out_dir,
                                  rsvqa_corpus** out) {
  return guarded([&] {
    require(options, "options");
    require(out_dir, "out_dir");
    rsvqa::synth::SynthConfig config;
    config.n_images = options->n_images;
    config.image_size = options->image_size;
    config.seed = options->seed;
    const auto result = rsvqa::synth::generate(config);
    const rsvqa::VQACorpus corpus =
        options->with_paraphrases ? rsvqa::synth::rule_paraphrase(result.corpus) : result.corpus;
    auto written = rsvqa::synth::write_corpus(result, corpus, out_dir);
    if (out) *out = new rsvqa_corpus{std::move(written)};
  });
}

void rsvqa_translator_options_init(rsvqa_translator_options* options) {
  if (!options) return;
  const rsvqa::HttpOptions defaults;
  options->kind = RSVQA_TRANSLATOR_MOCK;
  options->endpoint = nullptr;
  options->pivot_endpoints = nullptr;
  options->timeout_seconds = static_cast<double>(defaults.timeout.count()) / 1000.0;
  options->retries = defaults.retries;
  options->backoff_ms = static_cast<int>(defaults.backoff.count());
  options->bearer_token = nullptr;
  options->cache_path = nullptr;
}

rsvqa_status rsvqa_translator_create(const rsvqa_translator_options* options,
                                     rsvqa_translator** out) {
  return guarded([&] {
    require(options, "options");
    require(out, "out");
    auto handle = std::make_unique<rsvqa_translator>();
    if (options->kind == RSVQA_TRANSLATOR_HTTP) {
      rsvqa::HttpOptions http;
      if (options->endpoint) {
        http.endpoint = options->endpoint;
      } else if (const char* env = std::getenv("MT_ENDPOINT"); env && *env) {
        http.endpoint = env;
      }
      if (!(options->timeout_seconds > 0.0)) throw rsvqa::UsageError("timeout must be positive");
      if (options->retries < 0) throw rsvqa::UsageError("retries must be non-negative");
      if (options->backoff_ms < 0) throw rsvqa::UsageError("backoff must be non-negative");
      http.timeout = std::chrono::milliseconds(
          static_cast<std::int64_t>(options->timeout_seconds * 1000.0 + 0.5));
      http.retries = options->retries;
      http.backoff = std::chrono::milliseconds(options->backoff_ms);
      if (options->bearer_token) http.bearer_token = options->bearer_token;
      handle->http = std::make_shared<rsvqa::HttpTranslator>(
          http, parse_pivot_endpoints(options->pivot_endpoints));
      handle->translator = handle->http;
    } else if (options->kind == RSVQA_TRANSLATOR_MOCK) {
      handle->translator = std::make_shared<rsvqa::MockTranslator>();
    } else {
      throw rsvqa::UsageError("unknown translator kind");
    }
    if (options->cache_path) {
      handle->cache = std::make_shared<rsvqa::TranslationCache>(options->cache_path);
      handle->translator =
          std::make_shared<rsvqa::CachedTranslator>(handle->cache, handle->translator);
    }
    *out = handle.release();
  });
}

void rsvqa_translator_free(rsvqa_translator* translator) { delete translator; }

rsvqa_status rsvqa_translate(rsvqa_translator* translator, const char* text, const char* src,
                             const char* dst, char** out) {
  return guarded([&] {
    require(translator, "translator");
    require(text, "text");
    require(src, "src");
    require(dst, "dst");
    require(out, "out");
    *out = dup_string(translator->translator->translate(text, src, dst));
  });
}

rsvqa_status rsvqa_back_translate(rsvqa_translator* translator, const char* text,
                                  const char* pivot, char** out) {
  return guarded([&] {
    require(translator, "translator");
    require(text, "text");
    require(pivot, "pivot");
    require(out, "out");
    *out = dup_string(rsvqa::back_translate(text, pivot, *translator->translator));
  });
}

rsvqa_status rsvqa_translator_stats(const rsvqa_translator* translator, int64_t* http_requests,
                                    int64_t* cache_entries) {
  return guarded([&] {
    require(translator, "translator");
    if (http_requests) {
      *http_requests =
          translator->http ? static_cast<int64_t>(translator->http->requests_issued()) : 0;
    }
    if (cache_entries) {
      *cache_entries = translator->cache ? static_cast<int64_t>(translator->cache->size()) : 0;
    }
  });
}

void rsvqa_augment_options_init(rsvqa_augment_options* options) {
  if (!options) return;
  const rsvqa::AugmentOptions defaults;
  options->pivots = "zh,de,fr";
  options->dedup_normalize = defaults.policy.normalize;
  options->dedup_equal_original = defaults.policy.drop_equal_to_original;
  options->dedup_across_pivots = defaults.policy.drop_equal_across_pivots;
  options->has_id_base = 0;
  options->id_base = 0;
  options->max_concurrency = static_cast<int>(defaults.max_concurrency);
}

rsvqa_status rsvqa_augment(const rsvqa_corpus* corpus, rsvqa_translator* translator,
                           const rsvqa_augment_options* options, rsvqa_corpus** out,
                           char** drop_report_json) {
  return guarded([&] {
    require(corpus, "corpus");
    require(translator, "translator");
    require(options, "options");
    require(out, "out");
    require(options->pivots, "pivots");
    const auto pivots = split_list(options->pivots);
    if (pivots.empty()) throw rsvqa::UsageError("at least one pivot is required");
    if (options->max_concurrency < 1) throw rsvqa::UsageError("max_concurrency must be >= 1");
    rsvqa::AugmentOptions opts;
    opts.policy.normalize = options->dedup_normalize != 0;
    opts.policy.drop_equal_to_original = options->dedup_equal_original != 0;
    opts.policy.drop_equal_across_pivots = options->dedup_across_pivots != 0;
    if (options->has_id_base) opts.id_base = options->id_base;
    opts.max_concurrency = static_cast<std::size_t>(options->max_concurrency);
    auto result = rsvqa::augment_corpus(corpus->corpus, pivots, *translator->translator, opts);
    char* report = drop_report_json ? dup_string(result.drop_report_json()) : nullptr;
    *out = new rsvqa_corpus{std::move(result.corpus)};
    if (drop_report_json) *drop_report_json = report;
  });
}

rsvqa_status rsvqa_config_desk(rsvqa_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new rsvqa_config{rsvqa::TrainConfig::desk_profile()};
  });
}

rsvqa_status rsvqa_config_paper(rsvqa_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new rsvqa_config{rsvqa::TrainConfig::paper_profile()};
  });
}

rsvqa_status rsvqa_config_load(const char* path, rsvqa_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new rsvqa_config{rsvqa::TrainConfig::load(path)};
  });
}

rsvqa_status rsvqa_config_parse(const char* text, rsvqa_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new rsvqa_config{rsvqa::TrainConfig::parse(text)};
  });
}

rsvqa_status rsvqa_config_set(rsvqa_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    rsvqa::TrainConfig updated = config->config;
    updated.set(key, value);
    updated.validate();
    config->config = updated;
  });
}

rsvqa_status rsvqa_config_to_string(const rsvqa_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = dup_string(config->config.to_text());
  });
}

void rsvqa_config_free(rsvqa_config* config) { delete config; }

rsvqa_status rsvqa_train(const rsvqa_corpus* corpus, const rsvqa_config* config,
                         rsvqa_epoch_callback on_epoch, void* user_data,
                         rsvqa_checkpoint** out, char** history_csv) {
  return guarded([&] {
    require(corpus, "corpus");
    require(config, "config");
    require(out, "out");
    rsvqa::EpochCallback callback;
    if (on_epoch) {
      callback = [&](const rsvqa::EpochRecord& e) {
        const rsvqa_epoch_record record{e.epoch,    e.total,   e.ce_original,
                                        e.ce_paraphrase, e.triplet, e.val_oa};
        on_epoch(&record, user_data);
      };
    }
    auto result = rsvqa::train(corpus->corpus, config->config, nullptr, callback);
    char* csv = history_csv ? dup_string(result.history.to_csv()) : nullptr;
    *out = new rsvqa_checkpoint{std::move(result.checkpoint)};
    if (history_csv) *history_csv = csv;
  });
}

rsvqa_status rsvqa_checkpoint_load(const char* path, rsvqa_checkpoint** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new rsvqa_checkpoint{rsvqa::load_checkpoint(path)};
  });
}

rsvqa_status rsvqa_checkpoint_save(const rsvqa_checkpoint* checkpoint, const char* path) {
  return guarded([&] {
    require(checkpoint, "checkpoint");
    require(path, "path");
    rsvqa::save_checkpoint(checkpoint->checkpoint, path);
  });
}

rsvqa_status rsvqa_checkpoint_inspect(const rsvqa_checkpoint* checkpoint, char** out) {
  return guarded([&] {
    require(checkpoint, "checkpoint");
    require(out, "out");
    *out = dup_string(rsvqa::inspect_checkpoint(checkpoint->checkpoint));
  });
}

void rsvqa_checkpoint_free(rsvqa_checkpoint* checkpoint) { delete checkpoint; }

rsvqa_status rsvqa_evaluate(const rsvqa_checkpoint* checkpoint, const rsvqa_corpus* corpus,
                            const char* split, const char* filter, const char* setting,
                            char** report_json) {
  return guarded([&] {
    require(checkpoint, "checkpoint");
    require(corpus, "corpus");
    require(report_json, "report_json");
    const rsvqa::Split s = rsvqa::parse_split(split ? split : "test");
    const rsvqa::QuestionFilter f = rsvqa::parse_question_filter(filter ? filter : "all");
    const auto predictions =
        rsvqa::evaluate_model(checkpoint->checkpoint.model, corpus->corpus, s, f);
    *report_json = dup_string(rsvqa::report_to_json(
        rsvqa::score(predictions, setting ? setting : std::string())));
  });
}

rsvqa_status rsvqa_setting_matrix(const rsvqa_checkpoint* original_model,
                                  const rsvqa_checkpoint* augmented_model,
                                  const rsvqa_corpus* original_corpus,
                                  const rsvqa_corpus* augmented_corpus, const char* split,
                                  char** reports_json) {
  return guarded([&] {
    require(original_model, "original_model");
    require(augmented_model, "augmented_model");
    require(original_corpus, "original_corpus");
    require(augmented_corpus, "augmented_corpus");
    require(reports_json, "reports_json");
    const std::map<std::string, const rsvqa::Model*> models{
        {"original", &original_model->checkpoint.model},
        {"augmented", &augmented_model->checkpoint.model}};
    const std::map<std::string, const rsvqa::VQACorpus*> corpora{
        {"original", &original_corpus->corpus}, {"augmented", &augmented_corpus->corpus}};
    const auto reports =
        rsvqa::run_setting_matrix(models, corpora, rsvqa::parse_split(split ? split : "test"));
    nlohmann::ordered_json array = nlohmann::ordered_json::array();
    for (const auto& report : reports) {
      array.push_back(nlohmann::ordered_json::parse(rsvqa::report_to_json(report)));
    }
    *reports_json = dup_string(array.dump(2) + "\n");
  });
}

rsvqa_status rsvqa_report_render(const char* const* report_jsons, size_t count,
                                 const char* format, char** out) {
  return guarded([&] {
    require(format, "format");
    require(out, "out");
    if (count > 0) require(report_jsons, "report_jsons");
    std::vector<rsvqa::MetricsReport> reports;
    for (size_t i = 0; i < count; ++i) {
      require(report_jsons[i], "report json");
      reports.push_back(rsvqa::report_from_json(report_jsons[i]));
    }
    const std::string f = format;
    if (f == "markdown") {
      *out = dup_string(rsvqa::render_markdown(reports));
    } else if (f == "csv") {
      *out = dup_string(rsvqa::render_csv(reports));
    } else {
      throw rsvqa::UsageError("unknown report format '" + f + "' (expected markdown or csv)");
    }
  });
}

rsvqa_status rsvqa_report_chart(const char* report_json, const char* png_path) {
  return guarded([&] {
    require(report_json, "report_json");
    require(png_path, "png_path");
    rsvqa::write_png(rsvqa::render_bar_chart(rsvqa::report_from_json(report_json)), png_path);
  });
}

}  // extern "C"
