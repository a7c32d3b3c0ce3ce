// Copyright 2026 The Chrononer Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// C interface to the chrononer library. All functions are thread-safe
// unless they share a handle; handles are opaque and owned by the caller.
// Functions returning chrononer_status report failures through the status
// and chrononer_last_error(). Strings returned through char** out
// parameters are NUL-terminated UTF-8 and must be released with
// chrononer_string_free().

#ifndef CHRONONER_CHRONONER_H_
#define CHRONONER_CHRONONER_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CHRONONER_API __declspec(dllexport)
#elif defined(CHRONONER_BUILDING_LIBRARY)
#define CHRONONER_API __attribute__((visibility("default")))
#else
#define CHRONONER_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

// Values double as process exit codes.
typedef enum chrononer_status {
  CHRONONER_OK = 0,
  CHRONONER_CONFIG_ERROR = 1,
  CHRONONER_DATA_ERROR = 2,
  CHRONONER_NUMERICAL_ERROR = 3,
  CHRONONER_INTERNAL_ERROR = 4,
} chrononer_status;

typedef struct chrononer_config chrononer_config;
typedef struct chrononer_tagger chrononer_tagger;
typedef struct chrononer_lm chrononer_lm;

CHRONONER_API const char* chrononer_version(void);
// Message of the last failure on the calling thread; empty if none.
CHRONONER_API const char* chrononer_last_error(void);
CHRONONER_API void chrononer_string_free(char* s);

// ---- configuration ------------------------------------------------------

CHRONONER_API chrononer_status chrononer_config_new(chrononer_config** out);
CHRONONER_API void chrononer_config_free(chrononer_config* config);
CHRONONER_API chrononer_status chrononer_config_load_file(chrononer_config* config,
                                                          const char* path);
CHRONONER_API chrononer_status chrononer_config_set(chrononer_config* config, const char* key,
                                                    const char* value);
CHRONONER_API chrononer_status chrononer_config_get(const chrononer_config* config,
                                                    const char* key, char** value);
// Validates every setting; on success optionally returns the digest.
CHRONONER_API chrononer_status chrononer_config_validate(const chrononer_config* config,
                                                         char** digest);

// Schema of recognized keys; index in [0, count). Out-of-range indices
// return NULL.
CHRONONER_API size_t chrononer_config_key_count(void);
CHRONONER_API const char* chrononer_config_key_name(size_t index);
CHRONONER_API const char* chrononer_config_key_default(size_t index);
CHRONONER_API const char* chrononer_config_key_help(size_t index);

// ---- pipeline stages ----------------------------------------------------

// `stage` is one of synth, prepare, stats, pretrain, paths, hypotheses,
// report. The configuration is validated before anything is written.
// `summary` may be NULL.
CHRONONER_API chrononer_status chrononer_run_stage(const chrononer_config* config,
                                                   const char* stage, char** summary);
// Trains one tagger; `style` is "marked" or "unmarked".
CHRONONER_API chrononer_status chrononer_run_train(const chrononer_config* config,
                                                   const char* model, const char* style,
                                                   uint64_t seed, char** summary);

// ---- models -------------------------------------------------------------

CHRONONER_API chrononer_status chrononer_tagger_load(const char* path, chrononer_tagger** out);
CHRONONER_API void chrononer_tagger_free(chrononer_tagger* tagger);
// Returns a JSON array of {"start","end","label"} objects with offsets in
// Unicode scalar values.
CHRONONER_API chrononer_status chrononer_tagger_predict(const chrononer_tagger* tagger,
                                                        const char* text, char** spans_json);

CHRONONER_API chrononer_status chrononer_lm_load(const char* path, chrononer_lm** out);
CHRONONER_API void chrononer_lm_free(chrononer_lm* lm);
CHRONONER_API chrononer_status chrononer_lm_perplexity(const chrononer_lm* lm, const char* text,
                                                       double* perplexity);

// ---- corpus -------------------------------------------------------------

// One JSON paragraph record in, one out.
CHRONONER_API chrononer_status chrononer_corpus_strip_markers(const char* record,
                                                              char** result);
CHRONONER_API chrononer_status chrononer_corpus_add_markers(const char* record, char** result);
// Descriptive statistics of a JSON Lines file, per reign, as JSON.
CHRONONER_API chrononer_status chrononer_corpus_stats(const char* path, char** stats_json);

// ---- evaluation and statistics -----------------------------------------

typedef struct chrononer_prf {
  int64_t tp, fp, fn;
  double precision, recall, f1;
} chrononer_prf;

// Micro counts for two JSON arrays of spans from the same document.
CHRONONER_API chrononer_status chrononer_score_spans(const char* gold_json,
                                                     const char* predicted_json,
                                                     chrononer_prf* micro);

typedef struct chrononer_ttest {
  double t_stat, df, p_value, mean_a, mean_b;
} chrononer_ttest;

CHRONONER_API chrononer_status chrononer_welch_t(const double* a, size_t na, const double* b,
                                                 size_t nb, chrononer_ttest* out);
CHRONONER_API chrononer_status chrononer_student_t_sf(double t, double df, double* out);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // CHRONONER_CHRONONER_H_
