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

#ifndef RSVQA_RSVQA_H_
#define RSVQA_RSVQA_H_

/*
 * C interface to the rsvqa toolkit. Every function returns an rsvqa_status;
 * on failure rsvqa_last_error() describes the problem for the calling thread.
 * Strings returned through char** are owned by the caller and released with
 * rsvqa_string_free. Handles are released with their *_free function; passing
 * NULL to any *_free function is a no-op.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RSVQA_BUILDING_LIBRARY)
#define RSVQA_API __declspec(dllexport)
#else
#define RSVQA_API __declspec(dllimport)
#endif
#else
#define RSVQA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rsvqa_status {
  RSVQA_OK = 0,
  RSVQA_ERR_USAGE = 1,    /* bad argument, option or configuration */
  RSVQA_ERR_DATA = 2,     /* malformed or inconsistent input data */
  RSVQA_ERR_EXTERNAL = 3, /* translation service, network or filesystem */
  RSVQA_ERR_RUNTIME = 4   /* numerical failure or internal error */
} rsvqa_status;

typedef struct rsvqa_corpus rsvqa_corpus;
typedef struct rsvqa_translator rsvqa_translator;
typedef struct rsvqa_config rsvqa_config;
typedef struct rsvqa_checkpoint rsvqa_checkpoint;

RSVQA_API const char* rsvqa_version(void);
RSVQA_API const char* rsvqa_last_error(void);
RSVQA_API void rsvqa_string_free(char* s);

/* --- corpus ------------------------------------------------------------- */

/* Loads and validates a corpus file; image paths resolve against its directory. */
RSVQA_API rsvqa_status rsvqa_corpus_load(const char* path, rsvqa_corpus** out);
RSVQA_API rsvqa_status rsvqa_corpus_save(const rsvqa_corpus* corpus, const char* path);
RSVQA_API void rsvqa_corpus_free(rsvqa_corpus* corpus);
RSVQA_API rsvqa_status rsvqa_corpus_counts(const rsvqa_corpus* corpus, int64_t* images,
                                           int64_t* questions, int64_t* originals);
RSVQA_API rsvqa_status rsvqa_corpus_originals_only(const rsvqa_corpus* corpus,
                                                   rsvqa_corpus** out);

/* --- synthetic benchmark ------------------------------------------------ */

typedef struct rsvqa_synth_options {
  int n_images;
  int image_size;
  uint64_t seed;
  int with_paraphrases; /* attach rule paraphrases (held-out rules on test) */
} rsvqa_synth_options;

RSVQA_API void rsvqa_synth_options_init(rsvqa_synth_options* options);

/* Writes images/NNNN.png and corpus.json under out_dir. `out` may be NULL. */
RSVQA_API rsvqa_status rsvqa_synth_generate(const rsvqa_synth_options* options,
                                            const char* out_dir, rsvqa_corpus** out);

/* --- translation -------------------------------------------------------- */

typedef enum rsvqa_translator_kind {
  RSVQA_TRANSLATOR_MOCK = 0,
  RSVQA_TRANSLATOR_HTTP = 1
} rsvqa_translator_kind;

typedef struct rsvqa_translator_options {
  rsvqa_translator_kind kind;
  const char* endpoint;        /* NULL: MT_ENDPOINT, then http://127.0.0.1:5000 */
  const char* pivot_endpoints; /* "zh=http://a,de=http://b" or NULL */
  double timeout_seconds;
  int retries; /* extra attempts after the first */
  int backoff_ms;
  const char* bearer_token; /* NULL for none */
  const char* cache_path;   /* JSON-lines cache file, NULL for none */
} rsvqa_translator_options;

RSVQA_API void rsvqa_translator_options_init(rsvqa_translator_options* options);
RSVQA_API rsvqa_status rsvqa_translator_create(const rsvqa_translator_options* options,
                                               rsvqa_translator** out);
RSVQA_API void rsvqa_translator_free(rsvqa_translator* translator);
RSVQA_API rsvqa_status rsvqa_translate(rsvqa_translator* translator, const char* text,
                                       const char* src, const char* dst, char** out);
RSVQA_API rsvqa_status rsvqa_back_translate(rsvqa_translator* translator, const char* text,
                                            const char* pivot, char** out);
/* HTTP requests issued so far (0 for the mock) and entries held by the cache. */
RSVQA_API rsvqa_status rsvqa_translator_stats(const rsvqa_translator* translator,
                                              int64_t* http_requests, int64_t* cache_entries);

/* --- augmentation ------------------------------------------------------- */

typedef struct rsvqa_augment_options {
  const char* pivots; /* comma separated, e.g. "zh,de,fr" */
  int dedup_normalize;
  int dedup_equal_original;
  int dedup_across_pivots;
  int has_id_base;
  int64_t id_base;
  int max_concurrency;
} rsvqa_augment_options;

RSVQA_API void rsvqa_augment_options_init(rsvqa_augment_options* options);

/* `drop_report_json` may be NULL. */
RSVQA_API rsvqa_status rsvqa_augment(const rsvqa_corpus* corpus, rsvqa_translator* translator,
                                     const rsvqa_augment_options* options, rsvqa_corpus** out,
                                     char** drop_report_json);

/* --- training configuration --------------------------------------------- */

RSVQA_API rsvqa_status rsvqa_config_desk(rsvqa_config** out);
RSVQA_API rsvqa_status rsvqa_config_paper(rsvqa_config** out);
RSVQA_API rsvqa_status rsvqa_config_load(const char* path, rsvqa_config** out);
RSVQA_API rsvqa_status rsvqa_config_parse(const char* text, rsvqa_config** out);
RSVQA_API rsvqa_status rsvqa_config_set(rsvqa_config* config, const char* key,
                                        const char* value);
RSVQA_API rsvqa_status rsvqa_config_to_string(const rsvqa_config* config, char** out);
RSVQA_API void rsvqa_config_free(rsvqa_config* config);

/* --- training ----------------------------------------------------------- */

typedef struct rsvqa_epoch_record {
  int epoch;
  double total;
  double ce_original;
  double ce_paraphrase;
  double triplet;
  double val_oa;
} rsvqa_epoch_record;

typedef void (*rsvqa_epoch_callback)(const rsvqa_epoch_record* record, void* user_data);

/* `on_epoch` and `history_csv` may be NULL. */
RSVQA_API rsvqa_status rsvqa_train(const rsvqa_corpus* corpus, const rsvqa_config* config,
                                   rsvqa_epoch_callback on_epoch, void* user_data,
                                   rsvqa_checkpoint** out, char** history_csv);

RSVQA_API rsvqa_status rsvqa_checkpoint_load(const char* path, rsvqa_checkpoint** out);
RSVQA_API rsvqa_status rsvqa_checkpoint_save(const rsvqa_checkpoint* checkpoint,
                                             const char* path);
RSVQA_API rsvqa_status rsvqa_checkpoint_inspect(const rsvqa_checkpoint* checkpoint,
                                                char** out);
RSVQA_API void rsvqa_checkpoint_free(rsvqa_checkpoint* checkpoint);

/* --- evaluation --------------------------------------------------------- */

/* split: train|val|test; filter: all|originals_only|paraphrases_only.
 * Produces one report JSON object. `setting` labels the report and may be NULL. */
RSVQA_API rsvqa_status rsvqa_evaluate(const rsvqa_checkpoint* checkpoint,
                                      const rsvqa_corpus* corpus, const char* split,
                                      const char* filter, const char* setting,
                                      char** report_json);

/* original->original, original->augmented and augmented->augmented as a JSON
 * array of report objects. */
RSVQA_API rsvqa_status rsvqa_setting_matrix(const rsvqa_checkpoint* original_model,
                                            const rsvqa_checkpoint* augmented_model,
                                            const rsvqa_corpus* original_corpus,
                                            const rsvqa_corpus* augmented_corpus,
                                            const char* split, char** reports_json);

/* format: "markdown" or "csv"; one column per report. */
RSVQA_API rsvqa_status rsvqa_report_render(const char* const* report_jsons, size_t count,
                                           const char* format, char** out);
RSVQA_API rsvqa_status rsvqa_report_chart(const char* report_json, const char* png_path);

#ifdef __cplusplus
}
#endif

#endif /* RSVQA_RSVQA_H_ */
