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

// dynk command-line tool. Talks to the library only through the C API.

#include <dynk/dynk.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct CorpusDeleter {
  void operator()(dynk_corpus* corpus) const { dynk_corpus_free(corpus); }
};
using CorpusPtr = std::unique_ptr<dynk_corpus, CorpusDeleter>;

struct StringDeleter {
  void operator()(char* text) const { dynk_string_free(text); }
};
using TextPtr = std::unique_ptr<char, StringDeleter>;

// Thrown to unwind with an exit code after the message has been printed.
struct Exit {
  int code;
};

int exit_code(dynk_status status) {
  switch (status) {
    case DYNK_OK:
      return 0;
    case DYNK_ERROR_USAGE:
      return kExitUsage;
    case DYNK_ERROR_IO:
      return kExitIo;
    case DYNK_ERROR_VALIDATION:
    case DYNK_ERROR_UNDEFINED:
      return kExitValidation;
    default:
      return kExitUsage;
  }
}

void check(dynk_status status) {
  if (status == DYNK_OK) return;
  std::cerr << "dynk: " << dynk_last_error() << "\n";
  throw Exit{exit_code(status)};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "dynk: " << message << "\n";
  throw Exit{kExitUsage};
}

struct CommonFlags {
  std::string output = "-";
  std::string format = "csv";
  std::vector<std::string> k;
  std::string combine = "entities";
  std::string tie = "earliest";
  std::string selectors = "all-pairs";
  uint64_t seed = 0;
  uint32_t jobs = 1;
  bool lenient = false;
  bool absolute = false;
  bool zero_punct = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_selectors) {
  cmd->add_option("--output,-o", flags.output, "Output file ('-' for stdout)");
  cmd->add_option("--format", flags.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--k", flags.k,
                  "k spec: dynamic, fixed:N, fixed:A-B or fixed:N,M (repeatable)");
  cmd->add_option("--tie", flags.tie, "Tie-break at the fixed-k boundary")
      ->check(CLI::IsMember({"earliest", "random"}));
  cmd->add_option("--seed", flags.seed, "Seed for --tie random");
  cmd->add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--lenient", flags.lenient, "Skip invalid records instead of failing");
  cmd->add_flag("--abs", flags.absolute, "Rank absolute attribution values");
  cmd->add_flag("--zero-punct", flags.zero_punct,
                "Zero annotator selections on ASCII punctuation tokens");
  if (with_selectors) {
    cmd->add_option("--combine", flags.combine, "Method-human combination")
        ->check(CLI::IsMember({"entities", "average"}));
    cmd->add_option("--selectors", flags.selectors,
                    "all-pairs, pair:A,B, human or human:M");
  }
}

struct Options {
  std::vector<dynk_kspec> k_specs;
  std::string method_a;
  std::string method_b;
  dynk_options raw;
};

std::vector<dynk_kspec> parse_k(const std::vector<std::string>& items, const char* fallback) {
  std::string joined;
  for (const auto& item : items) joined += item + ";";
  if (joined.empty()) joined = fallback;
  size_t count = 0;
  dynk_parse_kspecs(joined.c_str(), nullptr, 0, &count);
  std::vector<dynk_kspec> specs(count);
  check(dynk_parse_kspecs(joined.c_str(), specs.data(), specs.size(), &count));
  return specs;
}

void build_options(const CommonFlags& flags, const char* default_k, Options& options) {
  dynk_options_init(&options.raw);
  options.k_specs = parse_k(flags.k, default_k);
  options.raw.k_specs = options.k_specs.data();
  options.raw.k_spec_count = options.k_specs.size();
  options.raw.format = flags.format == "json" ? DYNK_FORMAT_JSON : DYNK_FORMAT_CSV;
  options.raw.combine = flags.combine == "average" ? DYNK_COMBINE_AVERAGE : DYNK_COMBINE_ENTITIES;
  options.raw.tie = flags.tie == "random" ? DYNK_TIE_RANDOM : DYNK_TIE_EARLIEST;
  options.raw.seed = flags.seed;
  options.raw.jobs = flags.jobs;
  options.raw.absolute_scores = flags.absolute ? 1 : 0;

  const std::string& s = flags.selectors;
  if (s == "all-pairs") {
    options.raw.selectors = DYNK_SELECT_ALL_PAIRS;
  } else if (s == "human") {
    options.raw.selectors = DYNK_SELECT_HUMAN;
  } else if (s.rfind("human:", 0) == 0 && s.size() > 6) {
    options.raw.selectors = DYNK_SELECT_HUMAN;
    options.method_a = s.substr(6);
    options.raw.method_a = options.method_a.c_str();
  } else if (s.rfind("pair:", 0) == 0) {
    const auto rest = s.substr(5);
    const auto comma = rest.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == rest.size() ||
        rest.find(',', comma + 1) != std::string::npos) {
      usage_error("invalid --selectors '" + s + "': expected pair:A,B");
    }
    options.raw.selectors = DYNK_SELECT_PAIR;
    options.method_a = rest.substr(0, comma);
    options.method_b = rest.substr(comma + 1);
    options.raw.method_a = options.method_a.c_str();
    options.raw.method_b = options.method_b.c_str();
  } else {
    usage_error("invalid --selectors '" + s + "': expected all-pairs, pair:A,B, human or human:M");
  }
}

CorpusPtr load(const std::string& path, const CommonFlags& flags) {
  dynk_corpus* raw = nullptr;
  size_t skipped = 0;
  check(dynk_corpus_load(path.c_str(), flags.lenient ? 1 : 0, &raw, &skipped));
  CorpusPtr corpus(raw);
  if (skipped > 0) std::cerr << "dynk: skipped " << skipped << " invalid record(s) in " << path << "\n";
  if (flags.zero_punct) check(dynk_corpus_zero_punctuation(corpus.get(), nullptr, 0));
  return corpus;
}

void emit(const TextPtr& text, const std::string& output) {
  if (output == "-") {
    std::fwrite(text.get(), 1, std::char_traits<char>::length(text.get()), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "dynk: cannot open '" << output << "' for writing\n";
    throw Exit{kExitIo};
  }
  out << text.get();
  if (!out.flush()) {
    std::cerr << "dynk: write to '" << output << "' failed\n";
    throw Exit{kExitIo};
  }
}

template <typename Fn>
void run_report(Fn&& fn, const std::string& output) {
  char* raw = nullptr;
  check(fn(&raw));
  emit(TextPtr(raw), output);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynk: fixed and dynamic top-k agreement for feature attributions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dynk_version()));

  std::string input;
  std::vector<std::string> run_inputs;
  std::string bins = "quantile:5";

  CommonFlags agree_flags, delta_flags, bias_flags, apd_flags, topk_flags, validate_flags;

  auto* agree = app.add_subcommand("agree", "Agreement@k between methods or against annotators");
  agree->add_option("--input,-i", input, "Corpus file (JSON lines)")->required();
  add_common(agree, agree_flags, true);

  auto* delta = app.add_subcommand("delta", "Dynamic-k minus fixed-k agreement per method");
  delta->add_option("--input,-i", input, "Corpus file (JSON lines)")->required();
  add_common(delta, delta_flags, true);

  auto* bias = app.add_subcommand("bias", "Agreement by sentence-length bin and k");
  bias->add_option("--input,-i", input, "Corpus file (JSON lines)")->required();
  bias->add_option("--bins", bins, "quantile:Q or edges:E1,E2,...");
  add_common(bias, bias_flags, false);

  auto* apd = app.add_subcommand("apd", "Average pairwise difference across model runs");
  apd->add_option("--input,-i", run_inputs, "Run corpus as PATH or RUN_ID=PATH (repeatable)")
      ->required();
  add_common(apd, apd_flags, false);

  auto* topk = app.add_subcommand("topk", "Per-instance fixed or dynamic token selections");
  topk->add_option("--input,-i", input, "Corpus file (JSON lines)")->required();
  add_common(topk, topk_flags, false);

  auto* validate = app.add_subcommand("validate", "Validate a corpus file and summarize it");
  validate->add_option("--input,-i", input, "Corpus file (JSON lines)")->required();
  add_common(validate, validate_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    Options options;
    if (agree->parsed()) {
      build_options(agree_flags, "dynamic", options);
      auto corpus = load(input, agree_flags);
      run_report([&](char** out) { return dynk_report_agree(corpus.get(), &options.raw, out); },
                 agree_flags.output);
    } else if (delta->parsed()) {
      build_options(delta_flags, "fixed:1-5", options);
      std::vector<uint32_t> ks;
      for (const auto& spec : options.k_specs) {
        if (spec.dynamic) usage_error("delta compares fixed k against dynamic k; pass fixed k specs only");
        ks.push_back(spec.k);
      }
      auto corpus = load(input, delta_flags);
      run_report([&](char** out) {
        return dynk_report_delta(corpus.get(), &options.raw, ks.data(), ks.size(), out);
      }, delta_flags.output);
    } else if (bias->parsed()) {
      build_options(bias_flags, "fixed:1-10", options);
      auto corpus = load(input, bias_flags);
      run_report([&](char** out) {
        return dynk_report_bias(corpus.get(), &options.raw, bins.c_str(), out);
      }, bias_flags.output);
    } else if (apd->parsed()) {
      build_options(apd_flags, "dynamic", options);
      std::vector<std::string> ids;
      std::vector<CorpusPtr> corpora;
      for (const auto& item : run_inputs) {
        std::string id, path = item;
        const auto eq = item.find('=');
        if (eq != std::string::npos && item.find('/') > eq) {
          id = item.substr(0, eq);
          path = item.substr(eq + 1);
        } else {
          id = std::filesystem::path(item).stem().string();
        }
        ids.push_back(id);
        corpora.push_back(load(path, apd_flags));
      }
      std::vector<const dynk_corpus*> runs;
      std::vector<const char*> id_ptrs;
      for (std::size_t i = 0; i < corpora.size(); ++i) {
        runs.push_back(corpora[i].get());
        id_ptrs.push_back(ids[i].c_str());
      }
      run_report([&](char** out) {
        return dynk_report_apd(runs.data(), id_ptrs.data(), runs.size(), &options.raw, out);
      }, apd_flags.output);
    } else if (topk->parsed()) {
      build_options(topk_flags, "dynamic", options);
      auto corpus = load(input, topk_flags);
      run_report([&](char** out) { return dynk_report_topk(corpus.get(), &options.raw, out); },
                 topk_flags.output);
    } else if (validate->parsed()) {
      build_options(validate_flags, "dynamic", options);
      auto corpus = load(input, validate_flags);
      run_report([&](char** out) {
        return dynk_report_validate(corpus.get(), &options.raw, out);
      }, validate_flags.output);
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return 0;
}
