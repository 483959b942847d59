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

#ifndef DYNK_CORE_AGREEMENT_HPP_
#define DYNK_CORE_AGREEMENT_HPP_

// Token relevance and agreement@k between selector entities (attribution
// methods and human annotators), per sentence and over a corpus.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/profile.hpp"
#include "core/topk.hpp"

namespace dynk {

struct RelevanceVector {
  // Fraction of selectors whose selection contains each token.
  std::vector<double> values;
  std::size_t selector_count = 0;
};

RelevanceVector relevance(std::span<const std::vector<std::size_t>> selections,
                          std::size_t n);

// Ratio of annotators that selected each token.
RelevanceVector human_relevance(std::span<const AnnotatorVector> annotators);

// Mean relevance over tokens with non-zero relevance. Throws
// Error(kUndefined) if every value is zero.
double agreement_sentence(const RelevanceVector& relevance);

double agreement_dataset(std::span<const double> sentence_scores);

enum class CombineMode {
  // Each annotator is one selector next to the method (m = 1 + annotators).
  kAnnotatorsAsEntities,
  // r(w) = (method indicator + annotator ratio) / 2.
  kTwoEntityAverage,
};

std::string_view to_string(CombineMode mode) noexcept;
CombineMode parse_combine(std::string_view text);

struct SelectionOptions {
  TieBreak tie;
  // Rectify scores with |x| before selecting.
  bool absolute_scores = false;
  unsigned jobs = 1;
};

TopKSelection select_for_instance(const AttributionInstance& instance,
                                  std::size_t instance_index,
                                  const std::string& method, const KSpec& spec,
                                  const SelectionOptions& options);

struct KStats {
  double mean = 0.0;
  // Population standard deviation.
  double sd = 0.0;
  std::size_t fallback_count = 0;
  std::size_t n = 0;
};

KStats k_stats(std::span<const std::size_t> ks, std::size_t fallback_count);

// Dynamic-k statistics of one method over every instance of the corpus.
KStats dynamic_k_stats(const Corpus& corpus, const std::string& method,
                       const SelectionOptions& options = {});

struct AgreementEntry {
  std::string selector_a;
  std::string selector_b;
  KSpec k_spec;
  // Set for method-human entries only.
  std::optional<CombineMode> combine;
  double mean_agreement = 0.0;
  std::size_t n_instances = 0;
  // Instances skipped: no human annotations, or undefined agreement.
  std::size_t n_excluded = 0;
  // Set when k_spec is dynamic.
  std::optional<KStats> k_stats_a;
  std::optional<KStats> k_stats_b;
};

// Per-instance sentence agreement; nullopt where the instance is skipped.
std::vector<std::optional<double>> pair_sentence_scores(
    const Corpus& corpus, const std::string& method_a,
    const std::string& method_b, const KSpec& spec,
    const SelectionOptions& options = {});

std::vector<std::optional<double>> human_sentence_scores(
    const Corpus& corpus, const std::string& method, const KSpec& spec,
    CombineMode combine, const SelectionOptions& options = {});

AgreementEntry method_pair_agreement(const Corpus& corpus,
                                     const std::string& method_a,
                                     const std::string& method_b,
                                     const KSpec& spec,
                                     const SelectionOptions& options = {});

AgreementEntry method_human_agreement(
    const Corpus& corpus, const std::string& method, const KSpec& spec,
    CombineMode combine = CombineMode::kAnnotatorsAsEntities,
    const SelectionOptions& options = {});

struct SelectorSpec {
  enum class Kind { kAllPairs, kPair, kHuman };

  Kind kind = Kind::kAllPairs;
  std::string method_a;
  // kPair only.
  std::string method_b;

  static SelectorSpec all_pairs() { return {}; }
  static SelectorSpec pair(std::string a, std::string b) {
    return {Kind::kPair, std::move(a), std::move(b)};
  }
  // An empty method compares every method against the annotators.
  static SelectorSpec human(std::string method = {}) {
    return {Kind::kHuman, std::move(method), {}};
  }
};

// "all-pairs", "pair:A,B", "human" or "human:M".
SelectorSpec parse_selectors(std::string_view text);

struct ComparisonTarget {
  std::string method;
  // Empty for the human annotators.
  std::optional<std::string> other;
};

// Expands a selector spec into (method, other) comparisons over the corpus
// method set; all-pairs yields a < b in sorted order.
std::vector<ComparisonTarget> expand_selectors(const Corpus& corpus,
                                               const SelectorSpec& selectors);

AgreementEntry compare(const Corpus& corpus, const ComparisonTarget& target,
                       const KSpec& spec, CombineMode combine,
                       const SelectionOptions& options);

// One fixed-k entry per k for a single pair or method-human comparison.
std::vector<AgreementEntry> agreement_curve(
    const Corpus& corpus, const SelectorSpec& selectors,
    std::span<const std::size_t> k_values,
    CombineMode combine = CombineMode::kAnnotatorsAsEntities,
    const SelectionOptions& options = {});

}  // namespace dynk

#endif  // DYNK_CORE_AGREEMENT_HPP_
