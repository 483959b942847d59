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

#ifndef DYNK_CORE_REPORT_HPP_
#define DYNK_CORE_REPORT_HPP_

// Report tables behind the command-line tool: agreement matrices and
// curves, dynamic-vs-fixed deltas, sentence-length bias, APD and per-instance
// selections. Every renderer is deterministic: stable row order, six decimal
// places, newline-terminated.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/agreement.hpp"
#include "core/profile.hpp"
#include "core/run_selector.hpp"

namespace dynk {

enum class Format { kCsv, kJson };

Format parse_format(std::string_view text);

struct ReportOptions {
  std::vector<KSpec> k_specs = {KSpec::dynamic()};
  SelectorSpec selectors;
  CombineMode combine = CombineMode::kAnnotatorsAsEntities;
  SelectionOptions selection;
  Format format = Format::kCsv;
};

// Provenance echoed into JSON metadata.
struct SourceInfo {
  std::uint64_t checksum = 0;
  std::size_t skipped = 0;
};

std::string describe(const SelectorSpec& selectors);

// "%.6f" with negative zero printed as zero.
std::string format_fixed(double value);

std::string csv_field(std::string_view text);

struct AgreeReport {
  std::vector<AgreementEntry> entries;
  // Per-method dynamic-k statistics, filled when any k spec is dynamic.
  std::map<std::string, KStats> dynamic_k;
};

AgreeReport run_agree(const Corpus& corpus, const ReportOptions& options);
std::string render_agree(const AgreeReport& report, const Corpus& corpus,
                         const ReportOptions& options, const SourceInfo& source);

struct DeltaRow {
  std::string method;
  std::size_t fixed_k = 0;
  double mean_agreement_fixed = 0.0;
  double mean_agreement_dynamic = 0.0;
  double delta = 0.0;
};

struct DeltaTable {
  std::vector<DeltaRow> rows;
  // Comparisons summed into each row, per method.
  std::map<std::string, std::size_t> comparisons;
};

// For each focal method: agreement summed over its comparisons (the other
// methods, or the annotators) under each fixed k and under dynamic k.
DeltaTable run_delta(const Corpus& corpus, std::span<const std::size_t> fixed_ks,
                     const ReportOptions& options);
// The emitted delta equals the difference of the two emitted means exactly.
std::string render_delta(const DeltaTable& table, const Corpus& corpus,
                         const ReportOptions& options, const SourceInfo& source);

struct BinSpec {
  enum class Kind { kQuantile, kEdges };

  Kind kind = Kind::kQuantile;
  std::size_t quantiles = 5;
  // kEdges: first token count of every bin after the first.
  std::vector<std::size_t> edges;

  std::string describe() const;
};

// "quantile:Q" or "edges:E1,E2,...".
BinSpec parse_bins(std::string_view text);

struct LengthBin {
  // Inclusive token-count range.
  std::size_t lo = 0;
  std::size_t hi = 0;

  bool contains(std::size_t length) const { return length >= lo && length <= hi; }
  bool operator==(const LengthBin&) const = default;
};

// Partitions [min length, max length] into contiguous bins; throws
// Error(kValidation) naming the boundaries of any bin with no instance.
std::vector<LengthBin> make_bins(std::span<const std::size_t> lengths,
                                 const BinSpec& spec);

struct BiasRow {
  LengthBin bin;
  KSpec k_spec;
  double mean_agreement = 0.0;
  std::size_t n_instances = 0;
};

struct LengthBiasReport {
  std::vector<LengthBin> bins;
  std::vector<BiasRow> rows;
};

// Mean agreement over all method pairs per (length bin, k).
LengthBiasReport run_bias(const Corpus& corpus, const BinSpec& bins,
                          const ReportOptions& options);
std::string render_bias(const LengthBiasReport& report, const Corpus& corpus,
                        const BinSpec& bins, const ReportOptions& options,
                        const SourceInfo& source);

struct RunInput {
  std::string run_id;
  Corpus corpus;
  SourceInfo source;
};

ApdResult run_apd(std::span<const RunInput> runs);
std::string render_apd(const ApdResult& result, std::span<const RunInput> runs,
                       Format format);

struct TopKRecord {
  std::string instance_id;
  std::string method;
  TopKSelection selection;
  std::vector<std::string> tokens;
};

std::vector<TopKRecord> run_topk(const Corpus& corpus, const ReportOptions& options);
std::string render_topk(const std::vector<TopKRecord>& records,
                        const ReportOptions& options, const SourceInfo& source);

std::string render_validate(const Corpus& corpus, const SourceInfo& source,
                            Format format);

}  // namespace dynk

#endif  // DYNK_CORE_REPORT_HPP_
