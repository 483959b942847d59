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

#include "dynk/dynk.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <set>
#include <string>
#include <vector>

#include "core/agreement.hpp"
#include "core/error.hpp"
#include "core/profile.hpp"
#include "core/report.hpp"
#include "core/run_selector.hpp"
#include "core/synthetic.hpp"
#include "core/topk.hpp"

struct dynk_corpus {
  dynk::Corpus corpus;
  dynk::SourceInfo source;
};

namespace {

thread_local std::string last_error;

dynk_status fail(dynk_status status, const char* message) {
  last_error = message;
  return status;
}

template <typename Fn>
dynk_status guarded(Fn&& fn) {
  try {
    fn();
    return DYNK_OK;
  } catch (const dynk::Error& e) {
    return fail(static_cast<dynk_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(DYNK_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DYNK_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(DYNK_ERROR_INTERNAL, "unknown error");
  }
}

void require(bool condition, const char* message) {
  if (!condition) dynk::throw_usage(message);
}

char* to_c_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

dynk::TieBreak tie_of(dynk_tie_mode tie, uint64_t seed) {
  return tie == DYNK_TIE_RANDOM ? dynk::TieBreak::seeded(seed) : dynk::TieBreak::earliest();
}

dynk::ReportOptions convert(const dynk_options* options) {
  require(options != nullptr, "options must not be NULL");
  dynk::ReportOptions out;
  out.k_specs.clear();
  require(options->k_spec_count == 0 || options->k_specs != nullptr, "k_specs must not be NULL");
  for (size_t i = 0; i < options->k_spec_count; ++i) {
    const auto& spec = options->k_specs[i];
    out.k_specs.push_back(spec.dynamic ? dynk::KSpec::dynamic() : dynk::KSpec::fixed(spec.k));
  }
  switch (options->selectors) {
    case DYNK_SELECT_ALL_PAIRS:
      out.selectors = dynk::SelectorSpec::all_pairs();
      break;
    case DYNK_SELECT_PAIR:
      require(options->method_a && options->method_b, "pair selector needs two methods");
      out.selectors = dynk::SelectorSpec::pair(options->method_a, options->method_b);
      break;
    case DYNK_SELECT_HUMAN:
      out.selectors = dynk::SelectorSpec::human(options->method_a ? options->method_a : "");
      break;
    default:
      dynk::throw_usage("invalid selector kind");
  }
  out.combine = options->combine == DYNK_COMBINE_AVERAGE
                    ? dynk::CombineMode::kTwoEntityAverage
                    : dynk::CombineMode::kAnnotatorsAsEntities;
  out.selection.tie = tie_of(options->tie, options->seed);
  out.selection.tie.seed = options->seed;
  out.selection.absolute_scores = options->absolute_scores != 0;
  out.selection.jobs = options->jobs == 0 ? 1 : options->jobs;
  out.format = options->format == DYNK_FORMAT_JSON ? dynk::Format::kJson : dynk::Format::kCsv;
  return out;
}

void write_indices(const std::vector<std::size_t>& from, size_t* indices, size_t* count) {
  std::copy(from.begin(), from.end(), indices);
  *count = from.size();
}

}  // namespace

extern "C" {

void dynk_options_init(dynk_options* options) {
  if (options == nullptr) return;
  static const dynk_kspec kDynamic = {1, 0};
  *options = dynk_options{};
  options->k_specs = &kDynamic;
  options->k_spec_count = 1;
  options->selectors = DYNK_SELECT_ALL_PAIRS;
  options->combine = DYNK_COMBINE_ENTITIES;
  options->tie = DYNK_TIE_EARLIEST;
  options->jobs = 1;
  options->format = DYNK_FORMAT_CSV;
}

const char* dynk_last_error(void) { return last_error.c_str(); }

const char* dynk_version(void) { return "0.1.0"; }

void dynk_string_free(char* text) { std::free(text); }

dynk_status dynk_parse_kspecs(const char* text, dynk_kspec* out, size_t capacity,
                              size_t* count) {
  return guarded([&] {
    require(text != nullptr && count != nullptr, "text and count must not be NULL");
    const auto specs = dynk::parse_kspecs(text);
    *count = specs.size();
    if (specs.size() > capacity) dynk::throw_usage("too many k specs for the output buffer");
    require(out != nullptr, "out must not be NULL");
    for (size_t i = 0; i < specs.size(); ++i) {
      out[i] = dynk_kspec{specs[i].is_dynamic() ? 1 : 0, static_cast<uint32_t>(specs[i].k)};
    }
  });
}

dynk_status dynk_corpus_load(const char* path, int lenient, dynk_corpus** out,
                             size_t* skipped) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must not be NULL");
    auto loaded = dynk::load_corpus(
        path, lenient ? dynk::Strictness::kLenient : dynk::Strictness::kStrict);
    auto handle = std::make_unique<dynk_corpus>();
    handle->source = {loaded.checksum, loaded.skipped};
    handle->corpus = std::move(loaded.corpus);
    if (skipped != nullptr) *skipped = handle->source.skipped;
    *out = handle.release();
  });
}

dynk_status dynk_corpus_synthetic(uint64_t seed, size_t instances, size_t methods,
                                  uint32_t run, dynk_corpus** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    dynk::SyntheticConfig config;
    config.seed = seed;
    config.instances = instances;
    config.methods = methods;
    config.run = run;
    auto handle = std::make_unique<dynk_corpus>();
    handle->corpus = dynk::make_synthetic_corpus(config);
    handle->source.checksum = dynk::fnv1a64(dynk::serialize_corpus(handle->corpus));
    *out = handle.release();
  });
}

void dynk_corpus_free(dynk_corpus* corpus) { delete corpus; }

dynk_status dynk_corpus_write(const dynk_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus != nullptr && path != nullptr, "corpus and path must not be NULL");
    dynk::write_corpus(corpus->corpus, path);
  });
}

size_t dynk_corpus_instance_count(const dynk_corpus* corpus) {
  return corpus ? corpus->corpus.size() : 0;
}

size_t dynk_corpus_method_count(const dynk_corpus* corpus) {
  return corpus ? corpus->corpus.method_names.size() : 0;
}

const char* dynk_corpus_method_name(const dynk_corpus* corpus, size_t index) {
  if (corpus == nullptr || index >= corpus->corpus.method_names.size()) return nullptr;
  return corpus->corpus.method_names[index].c_str();
}

size_t dynk_corpus_max_length(const dynk_corpus* corpus) {
  return corpus ? corpus->corpus.max_length() : 0;
}

uint64_t dynk_corpus_checksum(const dynk_corpus* corpus) {
  return corpus ? corpus->source.checksum : 0;
}

dynk_status dynk_corpus_zero_punctuation(dynk_corpus* corpus, const char* const* tokens,
                                         size_t count) {
  return guarded([&] {
    require(corpus != nullptr, "corpus must not be NULL");
    std::set<std::string> punctuation;
    if (tokens == nullptr) {
      punctuation = dynk::default_punctuation_set();
    } else {
      for (size_t i = 0; i < count; ++i) {
        require(tokens[i] != nullptr, "punctuation token must not be NULL");
        punctuation.insert(tokens[i]);
      }
    }
    for (auto& instance : corpus->corpus.instances) {
      instance = dynk::zero_punctuation(std::move(instance), punctuation);
    }
  });
}

dynk_status dynk_fixed_topk(const double* scores, size_t n, size_t k, dynk_tie_mode tie,
                            uint64_t seed, size_t* indices, size_t* selected) {
  return guarded([&] {
    require(scores != nullptr && indices != nullptr && selected != nullptr,
            "scores, indices and selected must not be NULL");
    const auto selection = dynk::fixed_topk({scores, n}, k, tie_of(tie, seed));
    write_indices(selection.indices, indices, selected);
  });
}

dynk_status dynk_detect_peaks(const double* scores, size_t n, size_t* indices,
                              size_t* count) {
  return guarded([&] {
    require(scores != nullptr && indices != nullptr && count != nullptr,
            "scores, indices and count must not be NULL");
    write_indices(dynk::detect_peaks({scores, n}), indices, count);
  });
}

dynk_status dynk_dynamic_topk(const double* scores, size_t n, size_t* indices,
                              size_t* selected, int* fallback_used) {
  return guarded([&] {
    require(scores != nullptr && indices != nullptr && selected != nullptr,
            "scores, indices and selected must not be NULL");
    const auto selection = dynk::dynamic_topk({scores, n});
    write_indices(selection.indices, indices, selected);
    if (fallback_used != nullptr) *fallback_used = selection.fallback_used ? 1 : 0;
  });
}

dynk_status dynk_relevance(const size_t* const* selections, const size_t* selection_sizes,
                           size_t m, size_t n, double* values) {
  return guarded([&] {
    require(values != nullptr, "values must not be NULL");
    require(m == 0 || (selections != nullptr && selection_sizes != nullptr),
            "selections must not be NULL");
    std::vector<std::vector<std::size_t>> sets;
    for (size_t j = 0; j < m; ++j) {
      require(selection_sizes[j] == 0 || selections[j] != nullptr, "selection must not be NULL");
      sets.emplace_back(selections[j], selections[j] + selection_sizes[j]);
    }
    const auto r = dynk::relevance(sets, n);
    std::copy(r.values.begin(), r.values.end(), values);
  });
}

dynk_status dynk_agreement_sentence(const double* relevance, size_t n, double* agreement) {
  return guarded([&] {
    require(relevance != nullptr && agreement != nullptr,
            "relevance and agreement must not be NULL");
    dynk::RelevanceVector r;
    r.values.assign(relevance, relevance + n);
    r.selector_count = 0;
    *agreement = dynk::agreement_sentence(r);
  });
}

dynk_status dynk_report_agree(const dynk_corpus* corpus, const dynk_options* options,
                              char** out) {
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "corpus and out must not be NULL");
    const auto opts = convert(options);
    const auto report = dynk::run_agree(corpus->corpus, opts);
    *out = to_c_string(dynk::render_agree(report, corpus->corpus, opts, corpus->source));
  });
}

dynk_status dynk_report_delta(const dynk_corpus* corpus, const dynk_options* options,
                              const uint32_t* fixed_ks, size_t count, char** out) {
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "corpus and out must not be NULL");
    require(count == 0 || fixed_ks != nullptr, "fixed_ks must not be NULL");
    const auto opts = convert(options);
    const std::vector<std::size_t> ks(fixed_ks, fixed_ks + count);
    const auto table = dynk::run_delta(corpus->corpus, ks, opts);
    *out = to_c_string(dynk::render_delta(table, corpus->corpus, opts, corpus->source));
  });
}

dynk_status dynk_report_bias(const dynk_corpus* corpus, const dynk_options* options,
                             const char* bins, char** out) {
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "corpus and out must not be NULL");
    const auto opts = convert(options);
    const auto spec = bins ? dynk::parse_bins(bins) : dynk::BinSpec{};
    const auto report = dynk::run_bias(corpus->corpus, spec, opts);
    *out = to_c_string(dynk::render_bias(report, corpus->corpus, spec, opts, corpus->source));
  });
}

dynk_status dynk_report_topk(const dynk_corpus* corpus, const dynk_options* options,
                             char** out) {
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "corpus and out must not be NULL");
    const auto opts = convert(options);
    const auto records = dynk::run_topk(corpus->corpus, opts);
    *out = to_c_string(dynk::render_topk(records, opts, corpus->source));
  });
}

dynk_status dynk_report_validate(const dynk_corpus* corpus, const dynk_options* options,
                                 char** out) {
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "corpus and out must not be NULL");
    const auto opts = convert(options);
    *out = to_c_string(dynk::render_validate(corpus->corpus, corpus->source, opts.format));
  });
}

dynk_status dynk_report_apd(const dynk_corpus* const* runs, const char* const* run_ids,
                            size_t count, const dynk_options* options, char** out) {
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    require(runs != nullptr && run_ids != nullptr && out != nullptr,
            "runs, run_ids and out must not be NULL");
    const auto opts = convert(options);
    std::vector<dynk::RunInput> inputs;
    for (size_t i = 0; i < count; ++i) {
      require(runs[i] != nullptr && run_ids[i] != nullptr, "run entries must not be NULL");
      inputs.push_back({run_ids[i], runs[i]->corpus, runs[i]->source});
    }
    const auto result = dynk::run_apd(inputs);
    *out = to_c_string(dynk::render_apd(result, inputs, opts.format));
  });
}

}  // extern "C"
