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

/* Compiles the public header as C and drives a minimal session. */
#include "dynk/dynk.h"

#include <stdio.h>

int main(void) {
  dynk_corpus* corpus = NULL;
  dynk_options options;
  char* text = NULL;
  if (dynk_corpus_synthetic(1, 5, 2, 0, &corpus) != DYNK_OK) return 1;
  dynk_options_init(&options);
  if (dynk_report_validate(corpus, &options, &text) != DYNK_OK) {
    fprintf(stderr, "%s\n", dynk_last_error());
    dynk_corpus_free(corpus);
    return 1;
  }
  fputs(text, stdout);
  dynk_string_free(text);
  dynk_corpus_free(corpus);
  return 0;
}
