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

#include "core/agreement.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace dynk {

namespace {

struct InstanceOutcome {
  std::optional<double> score;
  bool used = false;
  std::size_t k_a = 0;
  std::size_t k_b = 0;
  bool fallback_a = false;
  bool fallback_b = false;
};

void require_method(const Corpus& corpus, const std::string& method) {
  if (!corpus.has_method(method)) {
    throw_usage(fmt::format("unknown method '{}'", method));
  }
}

std::vector<std::size_t> selected_positions(const AnnotatorVector& annotator) {
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < annotator.size(); ++i) {
    if (annotator[i] != 0) positions.push_back(i);
  }
  return positions;
}

std::optional<double> defined_agreement(const RelevanceVector& r) {
  try {
    return agreement_sentence(r);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kUndefined) throw;
    return std::nullopt;
  }
}

std::vector<InstanceOutcome> pair_outcomes(const Corpus& corpus,
                                           const std::string& a,
                                           const std::string& b,
                                           const KSpec& spec,
                                           const SelectionOptions& options) {
  require_method(corpus, a);
  require_method(corpus, b);
  std::vector<InstanceOutcome> outcomes(corpus.size());
  parallel_for(corpus.size(), options.jobs, [&](std::size_t i) {
    const auto& instance = corpus.instances[i];
    auto sel_a = select_for_instance(instance, i, a, spec, options);
    auto sel_b = select_for_instance(instance, i, b, spec, options);
    const std::vector<std::size_t> sets[] = {sel_a.indices, sel_b.indices};
    auto& out = outcomes[i];
    out.score = defined_agreement(relevance(sets, instance.size()));
    out.used = true;
    out.k_a = sel_a.k;
    out.k_b = sel_b.k;
    out.fallback_a = sel_a.fallback_used;
    out.fallback_b = sel_b.fallback_used;
  });
  return outcomes;
}

std::vector<InstanceOutcome> human_outcomes(const Corpus& corpus,
                                            const std::string& method,
                                            const KSpec& spec,
                                            CombineMode combine,
                                            const SelectionOptions& options) {
  require_method(corpus, method);
  std::vector<InstanceOutcome> outcomes(corpus.size());
  parallel_for(corpus.size(), options.jobs, [&](std::size_t i) {
    const auto& instance = corpus.instances[i];
    if (!instance.has_human()) return;
    auto sel = select_for_instance(instance, i, method, spec, options);
    RelevanceVector r;
    if (combine == CombineMode::kAnnotatorsAsEntities) {
      std::vector<std::vector<std::size_t>> sets;
      sets.push_back(sel.indices);
      for (const auto& annotator : *instance.human) {
        sets.push_back(selected_positions(annotator));
      }
      r = relevance(sets, instance.size());
    } else {
      const auto human = human_relevance(*instance.human);
      r.selector_count = 2;
      r.values.resize(instance.size());
      for (std::size_t t = 0; t < instance.size(); ++t) {
        r.values[t] = ((sel.contains(t) ? 1.0 : 0.0) + human.values[t]) / 2.0;
      }
    }
    auto& out = outcomes[i];
    out.score = defined_agreement(r);
    out.used = true;
    out.k_a = sel.k;
    out.fallback_a = sel.fallback_used;
  });
  return outcomes;
}

std::vector<std::optional<double>> scores_of(const std::vector<InstanceOutcome>& outcomes) {
  std::vector<std::optional<double>> scores;
  scores.reserve(outcomes.size());
  for (const auto& o : outcomes) scores.push_back(o.score);
  return scores;
}

KStats stats_of(const std::vector<InstanceOutcome>& outcomes, bool side_a) {
  std::vector<std::size_t> ks;
  std::size_t fallbacks = 0;
  for (const auto& o : outcomes) {
    if (!o.used) continue;
    ks.push_back(side_a ? o.k_a : o.k_b);
    fallbacks += (side_a ? o.fallback_a : o.fallback_b) ? 1 : 0;
  }
  return k_stats(ks, fallbacks);
}

AgreementEntry summarize(std::string a, std::string b, const KSpec& spec,
                         const std::vector<InstanceOutcome>& outcomes) {
  AgreementEntry entry;
  entry.selector_a = std::move(a);
  entry.selector_b = std::move(b);
  entry.k_spec = spec;
  std::vector<double> defined;
  for (const auto& o : outcomes) {
    if (o.score) {
      defined.push_back(*o.score);
    } else {
      ++entry.n_excluded;
    }
  }
  if (defined.empty()) {
    throw_validation(fmt::format("no instance yields a defined agreement for {} vs {}",
                                 entry.selector_a, entry.selector_b));
  }
  entry.n_instances = defined.size();
  entry.mean_agreement = agreement_dataset(defined);
  return entry;
}

}  // namespace

RelevanceVector relevance(std::span<const std::vector<std::size_t>> selections,
                          std::size_t n) {
  if (selections.empty()) throw_usage("relevance needs at least one selector");
  std::vector<std::size_t> counts(n, 0);
  for (const auto& selection : selections) {
    for (std::size_t index : selection) {
      if (index >= n) {
        throw_usage(fmt::format("selected index {} out of range for {} tokens", index, n));
      }
      ++counts[index];
    }
  }
  RelevanceVector r;
  r.selector_count = selections.size();
  r.values.reserve(n);
  const auto m = static_cast<double>(selections.size());
  for (std::size_t c : counts) r.values.push_back(static_cast<double>(c) / m);
  return r;
}

RelevanceVector human_relevance(std::span<const AnnotatorVector> annotators) {
  if (annotators.empty()) throw_usage("human relevance needs at least one annotator");
  const std::size_t n = annotators.front().size();
  std::vector<std::size_t> counts(n, 0);
  for (const auto& annotator : annotators) {
    if (annotator.size() != n) {
      throw_validation(fmt::format("ragged annotator vectors: {} vs {} entries",
                                   annotator.size(), n));
    }
    for (std::size_t i = 0; i < n; ++i) counts[i] += annotator[i] != 0 ? 1 : 0;
  }
  RelevanceVector r;
  r.selector_count = annotators.size();
  const auto m = static_cast<double>(annotators.size());
  for (std::size_t c : counts) r.values.push_back(static_cast<double>(c) / m);
  return r;
}

double agreement_sentence(const RelevanceVector& relevance) {
  double sum = 0.0;
  std::size_t relevant = 0;
  for (double v : relevance.values) {
    if (v > 0.0) {
      sum += v;
      ++relevant;
    }
  }
  if (relevant == 0) {
    throw Error(ErrorKind::kUndefined,
                "agreement is undefined: no token has non-zero relevance");
  }
  return sum / static_cast<double>(relevant);
}

double agreement_dataset(std::span<const double> sentence_scores) {
  if (sentence_scores.empty()) throw_usage("no sentence scores to average");
  double sum = 0.0;
  for (double s : sentence_scores) sum += s;
  return sum / static_cast<double>(sentence_scores.size());
}

std::string_view to_string(CombineMode mode) noexcept {
  return mode == CombineMode::kAnnotatorsAsEntities ? "entities" : "average";
}

CombineMode parse_combine(std::string_view text) {
  if (text == "entities") return CombineMode::kAnnotatorsAsEntities;
  if (text == "average") return CombineMode::kTwoEntityAverage;
  throw_usage(fmt::format("invalid combine mode '{}': expected entities or average", text));
}

TopKSelection select_for_instance(const AttributionInstance& instance,
                                  std::size_t instance_index,
                                  const std::string& method, const KSpec& spec,
                                  const SelectionOptions& options) {
  const TieBreak tie = options.tie.derive(instance_index, fnv1a64(method));
  const ScoreVector& scores = instance.scores(method);
  if (!options.absolute_scores) return select_topk(scores, spec, tie);
  ScoreVector rectified(scores.size());
  std::transform(scores.begin(), scores.end(), rectified.begin(),
                 [](double s) { return std::fabs(s); });
  return select_topk(rectified, spec, tie);
}

KStats k_stats(std::span<const std::size_t> ks, std::size_t fallback_count) {
  KStats stats;
  stats.n = ks.size();
  stats.fallback_count = fallback_count;
  if (ks.empty()) return stats;
  double sum = 0.0;
  for (auto k : ks) sum += static_cast<double>(k);
  stats.mean = sum / static_cast<double>(ks.size());
  double squares = 0.0;
  for (auto k : ks) {
    const double d = static_cast<double>(k) - stats.mean;
    squares += d * d;
  }
  stats.sd = std::sqrt(squares / static_cast<double>(ks.size()));
  return stats;
}

KStats dynamic_k_stats(const Corpus& corpus, const std::string& method,
                       const SelectionOptions& options) {
  require_method(corpus, method);
  std::vector<std::size_t> ks(corpus.size());
  std::vector<char> fallback(corpus.size(), 0);
  parallel_for(corpus.size(), options.jobs, [&](std::size_t i) {
    auto sel = select_for_instance(corpus.instances[i], i, method,
                                   KSpec::dynamic(), options);
    ks[i] = sel.k;
    fallback[i] = sel.fallback_used ? 1 : 0;
  });
  return k_stats(ks, static_cast<std::size_t>(std::count(fallback.begin(), fallback.end(), 1)));
}

std::vector<std::optional<double>> pair_sentence_scores(
    const Corpus& corpus, const std::string& method_a,
    const std::string& method_b, const KSpec& spec,
    const SelectionOptions& options) {
  return scores_of(pair_outcomes(corpus, method_a, method_b, spec, options));
}

std::vector<std::optional<double>> human_sentence_scores(
    const Corpus& corpus, const std::string& method, const KSpec& spec,
    CombineMode combine, const SelectionOptions& options) {
  return scores_of(human_outcomes(corpus, method, spec, combine, options));
}

AgreementEntry method_pair_agreement(const Corpus& corpus,
                                     const std::string& method_a,
                                     const std::string& method_b,
                                     const KSpec& spec,
                                     const SelectionOptions& options) {
  const auto outcomes = pair_outcomes(corpus, method_a, method_b, spec, options);
  AgreementEntry entry = summarize(method_a, method_b, spec, outcomes);
  if (spec.is_dynamic()) {
    entry.k_stats_a = stats_of(outcomes, true);
    entry.k_stats_b = stats_of(outcomes, false);
  }
  return entry;
}

AgreementEntry method_human_agreement(const Corpus& corpus,
                                      const std::string& method,
                                      const KSpec& spec, CombineMode combine,
                                      const SelectionOptions& options) {
  const auto outcomes = human_outcomes(corpus, method, spec, combine, options);
  const auto annotated = static_cast<std::size_t>(std::count_if(
      outcomes.begin(), outcomes.end(), [](const auto& o) { return o.used; }));
  if (annotated == 0) {
    throw_validation("no instance carries human annotations");
  }
  AgreementEntry entry = summarize(method, "human", spec, outcomes);
  entry.combine = combine;
  if (spec.is_dynamic()) entry.k_stats_a = stats_of(outcomes, true);
  return entry;
}

SelectorSpec parse_selectors(std::string_view text) {
  if (text == "all-pairs") return SelectorSpec::all_pairs();
  if (text == "human") return SelectorSpec::human();
  if (text.starts_with("human:")) {
    auto method = text.substr(6);
    if (method.empty()) throw_usage("selector 'human:' needs a method name");
    return SelectorSpec::human(std::string(method));
  }
  if (text.starts_with("pair:")) {
    auto rest = text.substr(5);
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos || rest.find(',', comma + 1) != std::string_view::npos ||
        comma == 0 || comma + 1 == rest.size()) {
      throw_usage(fmt::format("invalid pair selector '{}': expected pair:A,B", text));
    }
    return SelectorSpec::pair(std::string(rest.substr(0, comma)),
                              std::string(rest.substr(comma + 1)));
  }
  throw_usage(fmt::format(
      "invalid selectors '{}': expected all-pairs, pair:A,B, human or human:M", text));
}

std::vector<ComparisonTarget> expand_selectors(const Corpus& corpus,
                                               const SelectorSpec& selectors) {
  std::vector<ComparisonTarget> targets;
  switch (selectors.kind) {
    case SelectorSpec::Kind::kAllPairs:
      for (std::size_t i = 0; i < corpus.method_names.size(); ++i) {
        for (std::size_t j = i + 1; j < corpus.method_names.size(); ++j) {
          targets.push_back({corpus.method_names[i], corpus.method_names[j]});
        }
      }
      break;
    case SelectorSpec::Kind::kPair:
      require_method(corpus, selectors.method_a);
      require_method(corpus, selectors.method_b);
      targets.push_back({selectors.method_a, selectors.method_b});
      break;
    case SelectorSpec::Kind::kHuman:
      if (selectors.method_a.empty()) {
        for (const auto& m : corpus.method_names) targets.push_back({m, std::nullopt});
      } else {
        require_method(corpus, selectors.method_a);
        targets.push_back({selectors.method_a, std::nullopt});
      }
      break;
  }
  return targets;
}

AgreementEntry compare(const Corpus& corpus, const ComparisonTarget& target,
                       const KSpec& spec, CombineMode combine,
                       const SelectionOptions& options) {
  if (target.other) {
    return method_pair_agreement(corpus, target.method, *target.other, spec, options);
  }
  return method_human_agreement(corpus, target.method, spec, combine, options);
}

std::vector<AgreementEntry> agreement_curve(const Corpus& corpus,
                                            const SelectorSpec& selectors,
                                            std::span<const std::size_t> k_values,
                                            CombineMode combine,
                                            const SelectionOptions& options) {
  if (k_values.empty()) throw_usage("agreement curve needs at least one k");
  if (selectors.kind == SelectorSpec::Kind::kAllPairs ||
      (selectors.kind == SelectorSpec::Kind::kHuman && selectors.method_a.empty())) {
    throw_usage("agreement curve needs a single pair or method-human selector");
  }
  const auto target = expand_selectors(corpus, selectors).front();
  std::vector<AgreementEntry> curve;
  for (std::size_t k : k_values) {
    curve.push_back(compare(corpus, target, KSpec::fixed(k), combine, options));
  }
  return curve;
}

}  // namespace dynk
