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

#include "core/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "core/error.hpp"

namespace dynk {

namespace {

using ojson = nlohmann::ordered_json;

double rounded(double value) { return std::strtod(format_fixed(value).c_str(), nullptr); }

std::string checksum_string(std::uint64_t checksum) {
  return fmt::format("fnv1a64:{:016x}", checksum);
}

std::string tie_string(const TieBreak& tie) {
  return tie.kind == TieBreak::Kind::kEarliestIndex ? "earliest" : "random";
}

ojson kspec_list(const std::vector<KSpec>& specs) {
  ojson list = ojson::array();
  for (const auto& spec : specs) list.push_back(spec.describe());
  return list;
}

ojson kstats_json(const KStats& stats) {
  return ojson{{"mean", rounded(stats.mean)},
               {"sd", rounded(stats.sd)},
               {"fallbacks", stats.fallback_count},
               {"instances", stats.n}};
}

ojson metadata(std::string_view command, const Corpus& corpus,
               const ReportOptions& options, const SourceInfo& source) {
  ojson meta;
  meta["command"] = command;
  meta["k_specs"] = kspec_list(options.k_specs);
  meta["selectors"] = describe(options.selectors);
  meta["combine"] = to_string(options.combine);
  meta["tie"] = tie_string(options.selection.tie);
  meta["seed"] = options.selection.tie.seed;
  meta["absolute_scores"] = options.selection.absolute_scores;
  meta["corpus_checksum"] = checksum_string(source.checksum);
  meta["instances"] = corpus.size();
  meta["skipped"] = source.skipped;
  meta["methods"] = corpus.method_names;
  return meta;
}

std::string dump(const ojson& document) { return document.dump(2) + "\n"; }

bool any_dynamic(const std::vector<KSpec>& specs) {
  return std::any_of(specs.begin(), specs.end(),
                     [](const KSpec& s) { return s.is_dynamic(); });
}

std::string optional_stat(const std::optional<KStats>& stats, bool sd) {
  if (!stats) return {};
  return format_fixed(sd ? stats->sd : stats->mean);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::size_t> parse_count_list(std::string_view text, std::string_view context) {
  std::vector<std::size_t> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto part = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || value == 0) {
      throw_usage(fmt::format("invalid number '{}' in '{}'", part, context));
    }
    values.push_back(value);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return values;
}

}  // namespace

Format parse_format(std::string_view text) {
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  throw_usage(fmt::format("invalid format '{}': expected csv or json", text));
}

std::string describe(const SelectorSpec& selectors) {
  switch (selectors.kind) {
    case SelectorSpec::Kind::kAllPairs:
      return "all-pairs";
    case SelectorSpec::Kind::kPair:
      return fmt::format("pair:{},{}", selectors.method_a, selectors.method_b);
    case SelectorSpec::Kind::kHuman:
      return selectors.method_a.empty() ? "human" : "human:" + selectors.method_a;
  }
  return {};
}

std::string format_fixed(double value) {
  std::string text = fmt::format("{:.6f}", value);
  if (text == "-0.000000") text.erase(0, 1);
  return text;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

AgreeReport run_agree(const Corpus& corpus, const ReportOptions& options) {
  if (options.k_specs.empty()) throw_usage("no k spec given");
  const auto targets = expand_selectors(corpus, options.selectors);
  if (targets.empty()) {
    throw_validation("empty result set: the selectors match no comparison");
  }
  AgreeReport report;
  for (const auto& target : targets) {
    for (const auto& spec : options.k_specs) {
      report.entries.push_back(
          compare(corpus, target, spec, options.combine, options.selection));
    }
  }
  if (any_dynamic(options.k_specs)) {
    std::set<std::string> methods;
    for (const auto& target : targets) {
      methods.insert(target.method);
      if (target.other) methods.insert(*target.other);
    }
    for (const auto& method : methods) {
      report.dynamic_k[method] = dynamic_k_stats(corpus, method, options.selection);
    }
  }
  return report;
}

std::string render_agree(const AgreeReport& report, const Corpus& corpus,
                         const ReportOptions& options, const SourceInfo& source) {
  if (options.format == Format::kCsv) {
    std::string out =
        "selector_a,selector_b,k_spec,combine,mean_agreement,n_instances,n_excluded,"
        "mean_k_a,sd_k_a,mean_k_b,sd_k_b\n";
    for (const auto& e : report.entries) {
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(e.selector_a),
                         csv_field(e.selector_b), e.k_spec.describe(),
                         e.combine ? to_string(*e.combine) : "",
                         format_fixed(e.mean_agreement), e.n_instances, e.n_excluded,
                         optional_stat(e.k_stats_a, false), optional_stat(e.k_stats_a, true),
                         optional_stat(e.k_stats_b, false), optional_stat(e.k_stats_b, true));
    }
    return out;
  }
  ojson document;
  ojson meta = metadata("agree", corpus, options, source);
  if (options.selectors.kind == SelectorSpec::Kind::kHuman) {
    meta["notes"] = ojson::array(
        {"method selections use the k spec as given; they are not truncated to "
         "the number of tokens each annotator selected"});
  }
  ojson dynamic = ojson::object();
  for (const auto& [method, stats] : report.dynamic_k) dynamic[method] = kstats_json(stats);
  meta["dynamic_k"] = std::move(dynamic);
  document["metadata"] = std::move(meta);
  ojson entries = ojson::array();
  for (const auto& e : report.entries) {
    ojson row;
    row["selector_a"] = e.selector_a;
    row["selector_b"] = e.selector_b;
    row["k_spec"] = e.k_spec.describe();
    row["combine"] = e.combine ? ojson(to_string(*e.combine)) : ojson(nullptr);
    row["mean_agreement"] = rounded(e.mean_agreement);
    row["n_instances"] = e.n_instances;
    row["n_excluded"] = e.n_excluded;
    row["k_stats_a"] = e.k_stats_a ? kstats_json(*e.k_stats_a) : ojson(nullptr);
    row["k_stats_b"] = e.k_stats_b ? kstats_json(*e.k_stats_b) : ojson(nullptr);
    entries.push_back(std::move(row));
  }
  document["entries"] = std::move(entries);
  return dump(document);
}

DeltaTable run_delta(const Corpus& corpus, std::span<const std::size_t> fixed_ks,
                     const ReportOptions& options) {
  if (fixed_ks.empty()) throw_usage("delta needs at least one fixed k");
  for (auto k : fixed_ks) {
    if (k == 0) throw_usage("fixed k must be >= 1");
  }

  // Focal method -> the comparisons its row sums over.
  std::map<std::string, std::vector<ComparisonTarget>> focal;
  if (options.selectors.kind == SelectorSpec::Kind::kAllPairs) {
    for (const auto& method : corpus.method_names) {
      for (const auto& other : corpus.method_names) {
        if (other != method) focal[method].push_back({method, other});
      }
    }
  } else {
    for (const auto& target : expand_selectors(corpus, options.selectors)) {
      focal[target.method].push_back(target);
    }
  }
  std::erase_if(focal, [](const auto& item) { return item.second.empty(); });
  if (focal.empty()) throw_validation("empty result set: the selectors match no comparison");

  DeltaTable table;
  for (const auto& [method, targets] : focal) {
    table.comparisons[method] = targets.size();
    double dynamic_sum = 0.0;
    for (const auto& target : targets) {
      dynamic_sum += compare(corpus, target, KSpec::dynamic(), options.combine,
                             options.selection).mean_agreement;
    }
    for (std::size_t k : fixed_ks) {
      double fixed_sum = 0.0;
      for (const auto& target : targets) {
        fixed_sum += compare(corpus, target, KSpec::fixed(k), options.combine,
                             options.selection).mean_agreement;
      }
      table.rows.push_back({method, k, fixed_sum, dynamic_sum, dynamic_sum - fixed_sum});
    }
  }
  return table;
}

std::string render_delta(const DeltaTable& table, const Corpus& corpus,
                         const ReportOptions& options, const SourceInfo& source) {
  struct Printed {
    std::string fixed, dynamic, delta;
  };
  auto print = [](const DeltaRow& row) {
    Printed p{format_fixed(row.mean_agreement_fixed), format_fixed(row.mean_agreement_dynamic), {}};
    p.delta = format_fixed(std::strtod(p.dynamic.c_str(), nullptr) -
                           std::strtod(p.fixed.c_str(), nullptr));
    return p;
  };

  if (options.format == Format::kCsv) {
    std::string out = "method,fixed_k,mean_agreement_fixed,mean_agreement_dynamic,delta\n";
    for (const auto& row : table.rows) {
      const auto p = print(row);
      out += fmt::format("{},{},{},{},{}\n", csv_field(row.method), row.fixed_k, p.fixed,
                         p.dynamic, p.delta);
    }
    return out;
  }
  ojson document;
  ojson meta = metadata("delta", corpus, options, source);
  meta["aggregate"] = "sum";
  ojson comparisons = ojson::object();
  for (const auto& [method, count] : table.comparisons) comparisons[method] = count;
  meta["comparisons"] = std::move(comparisons);
  document["metadata"] = std::move(meta);
  ojson rows = ojson::array();
  for (const auto& row : table.rows) {
    const auto p = print(row);
    rows.push_back(ojson{{"method", row.method},
                         {"fixed_k", row.fixed_k},
                         {"mean_agreement_fixed", std::strtod(p.fixed.c_str(), nullptr)},
                         {"mean_agreement_dynamic", std::strtod(p.dynamic.c_str(), nullptr)},
                         {"delta", std::strtod(p.delta.c_str(), nullptr)}});
  }
  document["rows"] = std::move(rows);
  return dump(document);
}

std::string BinSpec::describe() const {
  if (kind == Kind::kQuantile) return fmt::format("quantile:{}", quantiles);
  std::vector<std::string> parts;
  for (auto e : edges) parts.push_back(std::to_string(e));
  return "edges:" + join(parts, ",");
}

BinSpec parse_bins(std::string_view text) {
  BinSpec spec;
  if (text.starts_with("quantile:")) {
    const auto values = parse_count_list(text.substr(9), text);
    if (values.size() != 1) throw_usage(fmt::format("invalid bins '{}'", text));
    spec.kind = BinSpec::Kind::kQuantile;
    spec.quantiles = values.front();
    return spec;
  }
  if (text.starts_with("edges:")) {
    spec.kind = BinSpec::Kind::kEdges;
    spec.edges = parse_count_list(text.substr(6), text);
    if (!std::is_sorted(spec.edges.begin(), spec.edges.end(), std::less_equal<>())) {
      throw_usage(fmt::format("bin edges in '{}' must be strictly increasing", text));
    }
    return spec;
  }
  throw_usage(fmt::format("invalid bins '{}': expected quantile:Q or edges:E1,E2,...", text));
}

std::vector<LengthBin> make_bins(std::span<const std::size_t> lengths, const BinSpec& spec) {
  if (lengths.empty()) throw_validation("cannot bin an empty corpus");
  std::vector<std::size_t> sorted(lengths.begin(), lengths.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t min_len = sorted.front();
  const std::size_t max_len = sorted.back();

  std::vector<std::size_t> starts{min_len};
  if (spec.kind == BinSpec::Kind::kQuantile) {
    const std::size_t q = spec.quantiles;
    for (std::size_t i = 1; i < q; ++i) {
      const std::size_t pos = (i * sorted.size() + q - 1) / q;
      if (pos < sorted.size() && sorted[pos] > starts.back()) starts.push_back(sorted[pos]);
    }
  } else {
    for (auto edge : spec.edges) starts.push_back(edge);
  }

  std::vector<LengthBin> bins;
  for (std::size_t j = 0; j < starts.size(); ++j) {
    const std::size_t lo = starts[j];
    const std::size_t next = j + 1 < starts.size() ? starts[j + 1] : max_len + 1;
    if (next <= lo) {
      throw_validation(fmt::format("empty length bin [{}, {}]", lo, next == 0 ? 0 : next - 1));
    }
    bins.push_back({lo, next - 1});
  }
  for (const auto& bin : bins) {
    const bool occupied = std::any_of(sorted.begin(), sorted.end(),
                                      [&](std::size_t n) { return bin.contains(n); });
    if (!occupied) throw_validation(fmt::format("empty length bin [{}, {}]", bin.lo, bin.hi));
  }
  return bins;
}

LengthBiasReport run_bias(const Corpus& corpus, const BinSpec& bin_spec,
                          const ReportOptions& options) {
  if (options.k_specs.empty()) throw_usage("no k spec given");
  std::vector<std::size_t> lengths;
  for (const auto& instance : corpus.instances) lengths.push_back(instance.size());

  LengthBiasReport report;
  report.bins = make_bins(lengths, bin_spec);
  const auto targets = expand_selectors(corpus, SelectorSpec::all_pairs());
  if (targets.empty()) throw_validation("empty result set: the corpus has fewer than two methods");

  std::vector<std::size_t> bin_of(corpus.size());
  std::vector<std::size_t> bin_size(report.bins.size(), 0);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t b = 0; b < report.bins.size(); ++b) {
      if (report.bins[b].contains(lengths[i])) {
        bin_of[i] = b;
        ++bin_size[b];
        break;
      }
    }
  }

  for (const auto& spec : options.k_specs) {
    std::vector<double> pair_mean_sum(report.bins.size(), 0.0);
    std::vector<std::size_t> pair_count(report.bins.size(), 0);
    for (const auto& target : targets) {
      const auto scores =
          pair_sentence_scores(corpus, target.method, *target.other, spec, options.selection);
      std::vector<std::vector<double>> per_bin(report.bins.size());
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (scores[i]) per_bin[bin_of[i]].push_back(*scores[i]);
      }
      for (std::size_t b = 0; b < report.bins.size(); ++b) {
        if (per_bin[b].empty()) continue;
        pair_mean_sum[b] += agreement_dataset(per_bin[b]);
        ++pair_count[b];
      }
    }
    for (std::size_t b = 0; b < report.bins.size(); ++b) {
      if (pair_count[b] == 0) {
        throw_validation(fmt::format("no defined agreement in length bin [{}, {}]",
                                     report.bins[b].lo, report.bins[b].hi));
      }
      report.rows.push_back({report.bins[b], spec,
                             pair_mean_sum[b] / static_cast<double>(pair_count[b]),
                             bin_size[b]});
    }
  }
  return report;
}

std::string render_bias(const LengthBiasReport& report, const Corpus& corpus,
                        const BinSpec& bins, const ReportOptions& options,
                        const SourceInfo& source) {
  if (options.format == Format::kCsv) {
    std::string out = "length_lo,length_hi,k_spec,mean_agreement,n_instances\n";
    for (const auto& row : report.rows) {
      out += fmt::format("{},{},{},{},{}\n", row.bin.lo, row.bin.hi, row.k_spec.describe(),
                         format_fixed(row.mean_agreement), row.n_instances);
    }
    return out;
  }
  ojson document;
  ojson meta = metadata("bias", corpus, options, source);
  meta["selectors"] = "all-pairs";
  meta["bins"] = bins.describe();
  document["metadata"] = std::move(meta);
  ojson rows = ojson::array();
  for (const auto& row : report.rows) {
    rows.push_back(ojson{{"length_lo", row.bin.lo},
                         {"length_hi", row.bin.hi},
                         {"k_spec", row.k_spec.describe()},
                         {"mean_agreement", rounded(row.mean_agreement)},
                         {"n_instances", row.n_instances}});
  }
  document["rows"] = std::move(rows);
  return dump(document);
}

ApdResult run_apd(std::span<const RunInput> runs) {
  if (runs.size() < 2) throw_usage("APD needs at least 2 run corpora");
  std::vector<Corpus> corpora;
  std::vector<std::string> ids;
  for (const auto& run : runs) {
    corpora.push_back(run.corpus);
    ids.push_back(run.run_id);
  }
  check_aligned(corpora, ids);
  std::vector<RunMatrix> matrices;
  for (const auto& run : runs) matrices.push_back(build_run_matrix(run.corpus, run.run_id));
  return apd_select(matrices);
}

std::string render_apd(const ApdResult& result, std::span<const RunInput> runs,
                       Format format) {
  if (format == Format::kCsv) {
    std::string out = "run_id,apd\n";
    for (const auto& run : runs) {
      out += fmt::format("{},{}\n", csv_field(run.run_id), format_fixed(result.scores.at(run.run_id)));
    }
    out += fmt::format("selected,{}\n", csv_field(result.selected));
    return out;
  }
  ojson document;
  ojson meta;
  meta["command"] = "apd";
  meta["runs"] = runs.size();
  meta["pairs"] = runs.size() * (runs.size() - 1) / 2;
  document["metadata"] = std::move(meta);
  ojson rows = ojson::array();
  for (const auto& run : runs) {
    rows.push_back(ojson{{"run_id", run.run_id},
                         {"apd", rounded(result.scores.at(run.run_id))},
                         {"corpus_checksum", checksum_string(run.source.checksum)}});
  }
  document["runs"] = std::move(rows);
  document["selected"] = result.selected;
  return dump(document);
}

std::vector<TopKRecord> run_topk(const Corpus& corpus, const ReportOptions& options) {
  if (options.k_specs.empty()) throw_usage("no k spec given");
  std::vector<TopKRecord> records;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& instance = corpus.instances[i];
    for (const auto& method : corpus.method_names) {
      for (const auto& spec : options.k_specs) {
        TopKRecord record;
        record.instance_id = instance.id;
        record.method = method;
        record.selection = select_for_instance(instance, i, method, spec, options.selection);
        for (auto index : record.selection.indices) record.tokens.push_back(instance.tokens[index]);
        records.push_back(std::move(record));
      }
    }
  }
  return records;
}

std::string render_topk(const std::vector<TopKRecord>& records,
                        const ReportOptions& options, const SourceInfo& source) {
  if (options.format == Format::kCsv) {
    std::string out = "instance_id,method,k_spec,k,fallback,indices,tokens\n";
    for (const auto& r : records) {
      std::vector<std::string> indices;
      for (auto index : r.selection.indices) indices.push_back(std::to_string(index));
      out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(r.instance_id), csv_field(r.method),
                         r.selection.mode.describe(), r.selection.k,
                         r.selection.fallback_used ? 1 : 0, join(indices, " "),
                         csv_field(join(r.tokens, " ")));
    }
    return out;
  }
  ojson document;
  ojson meta;
  meta["command"] = "topk";
  meta["k_specs"] = kspec_list(options.k_specs);
  meta["tie"] = tie_string(options.selection.tie);
  meta["seed"] = options.selection.tie.seed;
  meta["absolute_scores"] = options.selection.absolute_scores;
  meta["corpus_checksum"] = checksum_string(source.checksum);
  document["metadata"] = std::move(meta);
  ojson rows = ojson::array();
  for (const auto& r : records) {
    rows.push_back(ojson{{"instance_id", r.instance_id},
                         {"method", r.method},
                         {"k_spec", r.selection.mode.describe()},
                         {"k", r.selection.k},
                         {"fallback", r.selection.fallback_used},
                         {"indices", r.selection.indices},
                         {"tokens", r.tokens}});
  }
  document["selections"] = std::move(rows);
  return dump(document);
}

std::string render_validate(const Corpus& corpus, const SourceInfo& source, Format format) {
  std::size_t min_len = 0;
  if (!corpus.empty()) {
    min_len = corpus.instances.front().size();
    for (const auto& instance : corpus.instances) min_len = std::min(min_len, instance.size());
  }
  if (format == Format::kCsv) {
    std::string out = "key,value\n";
    out += fmt::format("instances,{}\n", corpus.size());
    out += fmt::format("skipped,{}\n", source.skipped);
    out += fmt::format("methods,{}\n", csv_field(join(corpus.method_names, ";")));
    out += fmt::format("annotated,{}\n", corpus.annotated_count());
    out += fmt::format("min_length,{}\n", min_len);
    out += fmt::format("max_length,{}\n", corpus.max_length());
    out += fmt::format("corpus_checksum,{}\n", checksum_string(source.checksum));
    return out;
  }
  ojson document{{"instances", corpus.size()},
                 {"skipped", source.skipped},
                 {"methods", corpus.method_names},
                 {"annotated", corpus.annotated_count()},
                 {"min_length", min_len},
                 {"max_length", corpus.max_length()},
                 {"corpus_checksum", checksum_string(source.checksum)}};
  return dump(document);
}

}  // namespace dynk
