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

// Writes a seeded synthetic corpus in the dynk JSON-lines format.

#include <dynk/dynk.h>

#include <iostream>
#include <string>

#include "CLI11.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dynk-synth: seeded synthetic attribution corpora"};
  std::string output;
  uint64_t seed = 42;
  size_t instances = 1000;
  size_t methods = 6;
  uint32_t run = 0;
  app.add_option("--output,-o", output, "Corpus file to write")->required();
  app.add_option("--seed", seed, "Seed for sentences, annotations and method noise");
  app.add_option("--instances", instances, "Number of instances")->check(CLI::PositiveNumber);
  app.add_option("--methods", methods, "Number of synthetic methods")->check(CLI::PositiveNumber);
  app.add_option("--run", run, "Run index; non-zero adds run-specific score noise");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  dynk_corpus* corpus = nullptr;
  dynk_status status = dynk_corpus_synthetic(seed, instances, methods, run, &corpus);
  if (status == DYNK_OK) status = dynk_corpus_write(corpus, output.c_str());
  dynk_corpus_free(corpus);
  if (status != DYNK_OK) {
    std::cerr << "dynk-synth: " << dynk_last_error() << "\n";
    return static_cast<int>(status);
  }
  return 0;
}
