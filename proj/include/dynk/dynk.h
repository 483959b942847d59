/*
 * Copyright 2026 The dynk Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DYNK_DYNK_H_
#define DYNK_DYNK_H_

/*
 * C interface to the dynk library: ingestion of attribution-profile corpora,
 * fixed and dynamic top-k selection, agreement@k reports, sentence-length
 * bias reports and APD-based run selection.
 *
 * Conventions:
 *  - Every fallible call returns a dynk_status. On failure a message is
 *    available from dynk_last_error() on the calling thread until the next
 *    failing call on that thread.
 *  - Corpora are opaque handles owned by the caller; release them with
 *    dynk_corpus_free().
 *  - Report text returned through a char** is NUL-terminated, heap-owned by
 *    the library and must be released with dynk_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DYNK_BUILDING_LIBRARY)
#    define DYNK_API __declspec(dllexport)
#  else
#    define DYNK_API __declspec(dllimport)
#  endif
#else
#  define DYNK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 1-3 double as the command-line exit codes. */
typedef enum dynk_status {
  DYNK_OK = 0,
  DYNK_ERROR_USAGE = 1,
  DYNK_ERROR_VALIDATION = 2,
  DYNK_ERROR_IO = 3,
  /* Agreement undefined: no token has non-zero relevance. */
  DYNK_ERROR_UNDEFINED = 4,
  DYNK_ERROR_INTERNAL = 5
} dynk_status;

typedef enum dynk_tie_mode {
  DYNK_TIE_EARLIEST = 0,
  DYNK_TIE_RANDOM = 1
} dynk_tie_mode;

typedef enum dynk_combine_mode {
  DYNK_COMBINE_ENTITIES = 0,
  DYNK_COMBINE_AVERAGE = 1
} dynk_combine_mode;

typedef enum dynk_selector_kind {
  DYNK_SELECT_ALL_PAIRS = 0,
  /* method_a vs method_b. */
  DYNK_SELECT_PAIR = 1,
  /* method_a vs the annotators; every method when method_a is NULL. */
  DYNK_SELECT_HUMAN = 2
} dynk_selector_kind;

typedef enum dynk_format {
  DYNK_FORMAT_CSV = 0,
  DYNK_FORMAT_JSON = 1
} dynk_format;

typedef struct dynk_kspec {
  int dynamic; /* non-zero: peak-based k; k is ignored */
  uint32_t k;  /* fixed k, >= 1 */
} dynk_kspec;

typedef struct dynk_options {
  const dynk_kspec* k_specs;
  size_t k_spec_count;
  dynk_selector_kind selectors;
  const char* method_a;
  const char* method_b;
  dynk_combine_mode combine;
  dynk_tie_mode tie;
  uint64_t seed;
  uint32_t jobs;
  int absolute_scores;
  dynk_format format;
} dynk_options;

typedef struct dynk_corpus dynk_corpus;

/* Defaults: one dynamic k spec, all pairs, annotators as entities, earliest
 * tie-break, seed 0, one job, raw scores, CSV. */
DYNK_API void dynk_options_init(dynk_options* options);

DYNK_API const char* dynk_last_error(void);
DYNK_API const char* dynk_version(void);
DYNK_API void dynk_string_free(char* text);

/* Parses "dynamic", "fixed:4", "fixed:1-5", "fixed:1,3" and ';'-joined
 * combinations. *count receives the number of specs; fails with
 * DYNK_ERROR_USAGE if it exceeds capacity. */
DYNK_API dynk_status dynk_parse_kspecs(const char* text, dynk_kspec* out,
                                       size_t capacity, size_t* count);

/* --- corpora ------------------------------------------------------------ */

/* Strict loading fails on the first invalid record; lenient loading skips
 * invalid records and reports how many through *skipped (may be NULL). */
DYNK_API dynk_status dynk_corpus_load(const char* path, int lenient,
                                      dynk_corpus** out, size_t* skipped);
DYNK_API dynk_status dynk_corpus_synthetic(uint64_t seed, size_t instances,
                                           size_t methods, uint32_t run,
                                           dynk_corpus** out);
DYNK_API void dynk_corpus_free(dynk_corpus* corpus);
DYNK_API dynk_status dynk_corpus_write(const dynk_corpus* corpus, const char* path);

DYNK_API size_t dynk_corpus_instance_count(const dynk_corpus* corpus);
DYNK_API size_t dynk_corpus_method_count(const dynk_corpus* corpus);
/* NULL when index is out of range. Valid while the corpus lives. */
DYNK_API const char* dynk_corpus_method_name(const dynk_corpus* corpus, size_t index);
DYNK_API size_t dynk_corpus_max_length(const dynk_corpus* corpus);
DYNK_API uint64_t dynk_corpus_checksum(const dynk_corpus* corpus);

/* Zeroes annotator selections on punctuation tokens. tokens == NULL uses the
 * ASCII punctuation characters. */
DYNK_API dynk_status dynk_corpus_zero_punctuation(dynk_corpus* corpus,
                                                  const char* const* tokens,
                                                  size_t count);

/* --- selection primitives ----------------------------------------------- */

/* `indices` must hold n entries; selected positions are written ascending. */
DYNK_API dynk_status dynk_fixed_topk(const double* scores, size_t n, size_t k,
                                     dynk_tie_mode tie, uint64_t seed,
                                     size_t* indices, size_t* selected);
DYNK_API dynk_status dynk_detect_peaks(const double* scores, size_t n,
                                       size_t* indices, size_t* count);
DYNK_API dynk_status dynk_dynamic_topk(const double* scores, size_t n,
                                       size_t* indices, size_t* selected,
                                       int* fallback_used);

/* Relevance of each of n tokens across m selections (index lists). */
DYNK_API dynk_status dynk_relevance(const size_t* const* selections,
                                    const size_t* selection_sizes, size_t m,
                                    size_t n, double* values);
DYNK_API dynk_status dynk_agreement_sentence(const double* relevance, size_t n,
                                             double* agreement);

/* --- reports ------------------------------------------------------------ */

DYNK_API dynk_status dynk_report_agree(const dynk_corpus* corpus,
                                       const dynk_options* options, char** out);
DYNK_API dynk_status dynk_report_delta(const dynk_corpus* corpus,
                                       const dynk_options* options,
                                       const uint32_t* fixed_ks, size_t count,
                                       char** out);
/* bins: "quantile:Q" or "edges:E1,E2,..."; NULL means quintiles. */
DYNK_API dynk_status dynk_report_bias(const dynk_corpus* corpus,
                                      const dynk_options* options,
                                      const char* bins, char** out);
DYNK_API dynk_status dynk_report_topk(const dynk_corpus* corpus,
                                      const dynk_options* options, char** out);
DYNK_API dynk_status dynk_report_validate(const dynk_corpus* corpus,
                                          const dynk_options* options, char** out);
DYNK_API dynk_status dynk_report_apd(const dynk_corpus* const* runs,
                                     const char* const* run_ids, size_t count,
                                     const dynk_options* options, char** out);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* DYNK_DYNK_H_ */
