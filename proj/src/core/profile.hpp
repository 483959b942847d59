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

#ifndef DYNK_CORE_PROFILE_HPP_
#define DYNK_CORE_PROFILE_HPP_

// Attribution profiles, human annotations and the line-delimited JSON
// corpus format that carries them.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace dynk {

using ScoreVector = std::vector<double>;
using AnnotatorVector = std::vector<std::uint8_t>;

// One sentence (premise and hypothesis as a single flat token sequence) with
// one score vector per attribution method.
struct AttributionInstance {
  std::string id;
  std::vector<std::string> tokens;
  // Keyed by method name; std::map keeps the canonical sorted-name order.
  std::map<std::string, ScoreVector> attributions;
  // One binary vector per annotator.
  std::optional<std::vector<AnnotatorVector>> human;
  std::optional<std::string> gold_label;
  std::optional<std::string> predicted_label;

  std::size_t size() const noexcept { return tokens.size(); }
  bool has_human() const noexcept { return human.has_value(); }
  const ScoreVector& scores(const std::string& method) const;

  bool operator==(const AttributionInstance&) const = default;
};

struct Corpus {
  std::vector<AttributionInstance> instances;
  // Sorted, unique.
  std::vector<std::string> method_names;

  std::size_t size() const noexcept { return instances.size(); }
  bool empty() const noexcept { return instances.empty(); }
  bool has_method(std::string_view name) const;
  std::size_t max_length() const noexcept;
  std::size_t annotated_count() const noexcept;

  bool operator==(const Corpus&) const = default;
};

// Throws Error(kValidation) naming the instance and the offending field.
void validate_instance(const AttributionInstance& instance);

// Validates every instance plus the corpus-level invariants (uniform method
// set, unique ids) and fills in method_names.
Corpus make_corpus(std::vector<AttributionInstance> instances);

// Parses one corpus record. Unknown fields are rejected.
AttributionInstance parse_instance(std::string_view line);

std::string serialize_instance(const AttributionInstance& instance);
std::string serialize_corpus(const Corpus& corpus);

enum class Strictness { kStrict, kLenient };

struct LoadResult {
  Corpus corpus;
  // Records dropped in lenient mode.
  std::size_t skipped = 0;
  // FNV-1a 64 over the raw input bytes.
  std::uint64_t checksum = 0;
};

LoadResult read_corpus(std::istream& in, Strictness strictness);
LoadResult load_corpus(const std::filesystem::path& path,
                       Strictness strictness = Strictness::kStrict);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

// ASCII punctuation characters, each as a single-character token.
std::set<std::string> default_punctuation_set();

// Forces annotator entries on punctuation tokens to 0. Scores are untouched.
AttributionInstance zero_punctuation(AttributionInstance instance,
                                     const std::set<std::string>& punctuation);

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t state = 0xcbf29ce484222325ULL) noexcept;

// How many tokens a method selects on an instance.
struct KSpec {
  enum class Mode { kFixed, kDynamic };

  Mode mode = Mode::kDynamic;
  // Only meaningful for kFixed; always >= 1 there.
  std::size_t k = 0;

  static KSpec fixed(std::size_t k);
  static KSpec dynamic() noexcept { return KSpec{}; }

  bool is_dynamic() const noexcept { return mode == Mode::kDynamic; }
  // "fixed:4" or "dynamic".
  std::string describe() const;

  bool operator==(const KSpec&) const = default;
};

// Accepts ';'-separated items, each "dynamic" or "fixed:<list>" where <list>
// is a comma-separated list of integers and inclusive ranges ("1-5").
std::vector<KSpec> parse_kspecs(std::string_view text);

}  // namespace dynk

#endif  // DYNK_CORE_PROFILE_HPP_
