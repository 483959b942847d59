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

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/agreement.hpp"
#include "core/error.hpp"
#include "core/report.hpp"
#include "core/run_selector.hpp"
#include "core/synthetic.hpp"
#include "core/topk.hpp"
#include "oracles.hpp"
#include "process.hpp"

namespace {

using namespace dynk;
using Clock = std::chrono::steady_clock;

constexpr double kTol = 1e-12;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && pass) {
      pass = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

AttributionInstance instance_of(std::string id,
                                std::vector<std::pair<std::string, ScoreVector>> methods,
                                std::optional<std::vector<AnnotatorVector>> human = std::nullopt) {
  AttributionInstance instance;
  instance.id = std::move(id);
  instance.tokens.assign(methods.front().second.size(), "w");
  for (auto& [name, scores] : methods) instance.attributions[name] = std::move(scores);
  instance.human = std::move(human);
  return instance;
}

Verdict peak_oracle() {
  Verdict v;
  oracle::Gen gen(1001);
  std::vector<std::vector<double>> inputs;
  for (int i = 0; i < 1000; ++i) inputs.push_back(gen.scores(gen.size(1, 50)));
  const auto start = Clock::now();
  std::size_t mismatches = 0;
  for (const auto& x : inputs) {
    if (as_set(detect_peaks(x)) != oracle::peaks(x)) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  v.require(mismatches == 0, std::to_string(mismatches) + " mismatching vectors");
  v.require(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  v.detail = v.pass ? "1000 vectors, " + std::to_string(elapsed) + " s" : v.detail;
  return v;
}

Verdict worked_examples() {
  Verdict v;
  const std::vector<double> x{0.1, 0.5, 0.2, 0.7, 0.3};
  v.require(detect_peaks(x) == std::vector<std::size_t>{1, 3}, "peaks of [0.1,0.5,0.2,0.7,0.3]");

  const RelevanceVector r{{0.0, 1.0, 0.5, 0.5, 0.0}, 2};
  v.require(std::abs(agreement_sentence(r) - 2.0 / 3.0) <= kTol, "agreement of [0,1,.5,.5,0]");

  std::vector<AttributionInstance> instances;
  instances.push_back(instance_of(
      "h", {{"m", {0.9, 0.1, 0.8, 0.2}}},
      std::vector<AnnotatorVector>{{1, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}}));
  const Corpus corpus = make_corpus(std::move(instances));
  const auto entry = method_human_agreement(corpus, "m", KSpec::fixed(2),
                                            CombineMode::kAnnotatorsAsEntities);
  // Relevance [3/4, 1/4, 1/4, 0] averaged over three relevant tokens.
  v.require(std::abs(entry.mean_agreement - 1.25 / 3.0) <= kTol, "method-human m=4 case");

  RunMatrix a{"a", 1, 2, {0.0, 1.0}};
  RunMatrix b{"b", 1, 2, {1.0, 1.0}};
  v.require(std::abs(average_difference(a, b) - 0.5) <= kTol, "AD([[0,1]],[[1,1]])");
  v.detail = v.pass ? "4 examples" : v.detail;
  return v;
}

Verdict invariance() {
  Verdict v;
  const std::vector<std::function<double(double)>> monotone = {
      [](double t) { return t * t * t; },
      [](double t) { return std::exp(t); },
      [](double t) { return std::atan(t); },
      [](double t) { return 3.0 * t - 1.0; },
  };
  oracle::Gen gen(1003);
  std::size_t failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = gen.grid_scores(gen.size(1, 30));
    const auto& f = monotone[gen.size(0, monotone.size() - 1)];
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), f);
    const std::size_t k = gen.size(1, 30);
    const TieBreak tie = gen.coin() ? TieBreak::earliest() : TieBreak::seeded(trial);
    if (fixed_topk(x, k, tie) != fixed_topk(y, k, tie)) ++failures;
  }
  const double scales[] = {0.5, 2.0, 4.0, 10.0};
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = gen.grid_scores(gen.size(1, 50));
    const double a = scales[gen.size(0, 3)];
    const double b = (static_cast<double>(gen.size(0, 16)) - 8.0) / 4.0;
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [&](double t) { return a * t + b; });
    if (dynamic_topk(x) != dynamic_topk(y)) ++failures;
  }
  v.require(failures == 0, std::to_string(failures) + " failing pairs");
  v.detail = v.pass ? "2 x 1000 pairs" : v.detail;
  return v;
}

Verdict saturation(const Corpus& bundled) {
  Verdict v;
  std::vector<Corpus> corpora;
  corpora.push_back(bundled);
  SyntheticConfig config;
  config.seed = 1004;
  config.instances = 200;
  config.min_length = 1;
  config.max_length = 12;
  corpora.push_back(make_synthetic_corpus(config));
  std::size_t pairs = 0;
  for (const auto& corpus : corpora) {
    const KSpec k = KSpec::fixed(corpus.max_length());
    for (const auto& target : expand_selectors(corpus, SelectorSpec::all_pairs())) {
      const auto entry = method_pair_agreement(corpus, target.method, *target.other, k);
      v.require(entry.mean_agreement == 1.0, target.method + " vs " + *target.other);
      ++pairs;
    }
  }
  v.detail = v.pass ? std::to_string(pairs) + " pairs" : v.detail;
  return v;
}

Verdict agreement_oracle() {
  Verdict v;
  oracle::Gen gen(1005);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = gen.size(1, 10);
    const std::size_t m = gen.size(1, 4);
    std::vector<std::set<std::size_t>> sets;
    std::vector<std::vector<std::size_t>> selections;
    for (std::size_t j = 0; j < m; ++j) {
      sets.push_back(gen.subset(n, j == 0 ? 1 : 0));
      selections.emplace_back(sets.back().begin(), sets.back().end());
    }
    const double value = agreement_sentence(relevance(selections, n));
    worst = std::max(worst, std::abs(value - oracle::sentence_agreement(sets, n)));
  }
  v.require(worst <= kTol, "max error " + std::to_string(worst));
  v.detail = v.pass ? "1000 instances" : v.detail;
  return v;
}

// Padded (instance x method) rows, built independently of build_run_matrix.
std::vector<std::vector<double>> padded_rows(const Corpus& corpus, std::size_t width) {
  std::vector<std::vector<double>> rows;
  for (const auto& instance : corpus.instances) {
    for (const auto& [method, scores] : instance.attributions) {
      std::vector<double> row(width, 0.0);
      std::copy(scores.begin(), scores.end(), row.begin());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

Verdict apd_correctness() {
  Verdict v;
  std::vector<Corpus> corpora;
  std::size_t width = 0;
  for (std::uint32_t run = 1; run <= 10; ++run) {
    SyntheticConfig config;
    config.instances = 100;
    config.run = run;
    corpora.push_back(make_synthetic_corpus(config));
    width = std::max(width, corpora.back().max_length());
  }
  std::vector<RunMatrix> matrices;
  std::vector<std::vector<std::vector<double>>> raw;
  for (std::size_t i = 0; i < corpora.size(); ++i) {
    matrices.push_back(build_run_matrix(corpora[i], "run_" + std::to_string(i + 1)));
    raw.push_back(padded_rows(corpora[i], width));
  }
  const auto result = apd_select(matrices);
  const auto expected = oracle::apd(raw);
  std::size_t best = 0;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    v.require(std::abs(result.scores.at(matrices[i].run_id) - expected[i]) <= kTol,
              matrices[i].run_id + " differs from the pairwise oracle");
    if (expected[i] < expected[best]) best = i;
  }
  v.require(result.selected == matrices[best].run_id, "selected run differs from the oracle");

  oracle::Gen gen(1006);
  const auto random_matrix = [&](const std::string& id) {
    RunMatrix m{id, 4, 6, {}};
    for (int i = 0; i < 24; ++i) m.values.push_back(gen.real(-1.0, 1.0));
    return m;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_matrix("a");
    const auto b = random_matrix("b");
    const auto c = random_matrix("c");
    v.require(average_difference(a, b) == average_difference(b, a), "symmetry");
    v.require(average_difference(a, a) == 0.0 && average_difference(a, b) > 0.0, "identity");
    v.require(average_difference(a, c) <= average_difference(a, b) + average_difference(b, c) + 1e-15,
              "triangle inequality");
  }
  v.detail = v.pass ? "10 runs, 100 triples, selected " + result.selected : v.detail;
  return v;
}

Verdict determinism(const std::string& data) {
  Verdict v;
  const auto scratch = dynk::testing::scratch_dir("acceptance");
  std::vector<std::string> runs;
  for (int run = 1; run <= 3; ++run) {
    const auto path = (scratch / ("run" + std::to_string(run) + ".jsonl")).string();
    const auto synth = dynk::testing::run(
        DYNK_SYNTH_BIN, {"--seed", "42", "--run", std::to_string(run), "--output", path}, scratch);
    v.require(synth.exit_code == 0, "dynk-synth failed: " + synth.err);
    runs.push_back(path);
  }
  const std::map<std::string, std::vector<std::string>> commands = {
      {"agree", {"agree", "--input", data}},
      {"delta", {"delta", "--input", data}},
      {"bias", {"bias", "--input", data}},
      {"apd", {"apd", "--input", data, "--input", runs[0], "--input", runs[1], "--input", runs[2]}},
  };
  const auto start = Clock::now();
  for (const auto& [name, args] : commands) {
    std::string reference;
    for (int attempt = 0; attempt < 4; ++attempt) {
      auto call = args;
      call.push_back("--jobs");
      call.push_back(attempt == 3 ? "8" : "1");
      const auto outcome = dynk::testing::run(DYNK_CLI_BIN, call, scratch);
      v.require(outcome.exit_code == 0, name + " exited " + std::to_string(outcome.exit_code) +
                                            ": " + outcome.err);
      v.require(!outcome.out.empty(), name + " produced no output");
      if (attempt == 0) {
        reference = outcome.out;
      } else {
        v.require(outcome.out == reference, name + " output differs on attempt " +
                                                std::to_string(attempt + 1));
      }
    }
  }
  const double elapsed = seconds_since(start);
  std::filesystem::remove_all(scratch);
  v.require(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
  v.detail = v.pass ? "16 invocations, " + std::to_string(elapsed) + " s" : v.detail;
  return v;
}

Verdict delta_fixture() {
  Verdict v;
  // Selections (dynamic | k=1 | k=2):
  //   x: A {1,3}|{3}|{1,3}  B {1}|{1}|{1,3}  C {4}|{4}|{3,4}
  //   y: A {0}  |{0}|{0,1}  B {1}|{1}|{1,3}  C {2}|{0}|{0,2}
  std::vector<AttributionInstance> instances;
  instances.push_back(instance_of("x", {{"A", {0.1, 0.5, 0.2, 0.7, 0.3}},
                                        {"B", {0.0, 9.0, 0.0, 0.5, 0.0}},
                                        {"C", {1, 2, 3, 4, 5}}}));
  instances.push_back(instance_of("y", {{"A", {0.2, 0.2, 0.2, 0.2}},
                                        {"B", {0.1, 0.8, 0.3, 0.4}},
                                        {"C", {0.9, 0.1, 0.6, 0.2}}}));
  const Corpus corpus = make_corpus(std::move(instances));

  // Oracle: per-pair means from the hand-computed sets, summed per method.
  using Sets = std::map<std::string, std::vector<std::set<std::size_t>>>;
  const std::map<std::string, Sets> selections = {
      {"dynamic", {{"A", {{1, 3}, {0}}}, {"B", {{1}, {1}}}, {"C", {{4}, {2}}}}},
      {"1", {{"A", {{3}, {0}}}, {"B", {{1}, {1}}}, {"C", {{4}, {0}}}}},
      {"2", {{"A", {{1, 3}, {0, 1}}}, {"B", {{1, 3}, {1, 3}}}, {"C", {{3, 4}, {0, 2}}}}},
  };
  const std::size_t lengths[] = {5, 4};
  const auto summed = [&](const std::string& spec, const std::string& method) {
    double total = 0.0;
    for (const std::string other : {"A", "B", "C"}) {
      if (other == method) continue;
      std::vector<double> per_sentence;
      for (std::size_t i = 0; i < 2; ++i) {
        per_sentence.push_back(oracle::sentence_agreement(
            {selections.at(spec).at(method)[i], selections.at(spec).at(other)[i]}, lengths[i]));
      }
      total += oracle::mean(per_sentence);
    }
    return total;
  };

  const std::vector<std::size_t> ks = {1, 2};
  ReportOptions options;
  const auto table = run_delta(corpus, ks, options);
  v.require(table.rows.size() == 6, "expected 6 rows");
  for (const auto& row : table.rows) {
    const double fixed = summed(std::to_string(row.fixed_k), row.method);
    const double dynamic = summed("dynamic", row.method);
    v.require(std::abs(row.mean_agreement_fixed - fixed) <= kTol,
              row.method + "@" + std::to_string(row.fixed_k) + " fixed");
    v.require(std::abs(row.mean_agreement_dynamic - dynamic) <= kTol, row.method + " dynamic");
    v.require(std::abs(row.delta - (dynamic - fixed)) <= kTol,
              row.method + "@" + std::to_string(row.fixed_k) + " delta");
  }

  for (const Format format : {Format::kCsv, Format::kJson}) {
    options.format = format;
    const std::string text = render_delta(table, corpus, options, {});
    if (format == Format::kCsv) {
      std::istringstream in(text);
      std::string line;
      std::getline(in, line);
      std::size_t rows = 0;
      while (std::getline(in, line)) {
        double fields[3];
        std::istringstream ss(line.substr(line.find(',', line.find(',') + 1) + 1));
        char comma;
        ss >> fields[0] >> comma >> fields[1] >> comma >> fields[2];
        v.require(std::abs(fields[2] - (fields[1] - fields[0])) <= kTol, "csv row " + line);
        ++rows;
      }
      v.require(rows == 6, "csv row count");
    } else {
      const auto json = nlohmann::json::parse(text);
      for (const auto& row : json["rows"]) {
        const double fixed = row["mean_agreement_fixed"];
        const double dynamic = row["mean_agreement_dynamic"];
        const double delta = row["delta"];
        v.require(std::abs(delta - (dynamic - fixed)) <= kTol, "json row " + row.dump());
      }
      v.require(json["rows"].size() == 6, "json row count");
    }
  }
  v.detail = v.pass ? "6 rows, csv and json consistent" : v.detail;
  return v;
}

}  // namespace

int main() {
  const std::string data = std::string(DYNK_TEST_DATA_DIR) + "/synthetic_1000.jsonl";
  Corpus bundled;
  try {
    bundled = load_corpus(data).corpus;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cannot load %s: %s\n", data.c_str(), e.what());
    return 1;
  }

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"peak-detection-oracle", peak_oracle},
      {"worked-examples", worked_examples},
      {"invariance", invariance},
      {"saturation", [&] { return saturation(bundled); }},
      {"agreement-oracle", agreement_oracle},
      {"apd-correctness", apd_correctness},
      {"determinism", [&] { return determinism(data); }},
      {"delta-fixture", delta_fixture},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict verdict;
    try {
      verdict = check();
    } catch (const std::exception& e) {
      verdict = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", verdict.pass ? "PASS" : "FAIL", name.c_str(),
                verdict.detail.c_str());
    if (!verdict.pass) ++failed;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
