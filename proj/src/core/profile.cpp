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

#include "core/profile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "core/error.hpp"

namespace dynk {

namespace {

using nlohmann::json;

constexpr std::string_view kKnownFields[] = {
    "id", "tokens", "attributions", "human", "gold_label", "predicted_label"};

std::string describe_id(const std::string& id) {
  return fmt::format("instance '{}'", id);
}

const json& require_field(const json& record, const char* name) {
  auto it = record.find(name);
  if (it == record.end()) {
    throw_validation(fmt::format("missing required field '{}'", name));
  }
  return *it;
}

std::optional<std::string> optional_string(const json& record,
                                           const char* name,
                                           const std::string& id) {
  auto it = record.find(name);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw_validation(
        fmt::format("{}: field '{}' must be a string", describe_id(id), name));
  }
  return it->get<std::string>();
}

}  // namespace

const ScoreVector& AttributionInstance::scores(const std::string& method) const {
  auto it = attributions.find(method);
  if (it == attributions.end()) {
    throw_usage(fmt::format("{} has no scores for method '{}'",
                            describe_id(id), method));
  }
  return it->second;
}

bool Corpus::has_method(std::string_view name) const {
  return std::binary_search(method_names.begin(), method_names.end(), name);
}

std::size_t Corpus::max_length() const noexcept {
  std::size_t longest = 0;
  for (const auto& instance : instances) {
    longest = std::max(longest, instance.size());
  }
  return longest;
}

std::size_t Corpus::annotated_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(instances.begin(), instances.end(),
                    [](const auto& instance) { return instance.has_human(); }));
}

void validate_instance(const AttributionInstance& instance) {
  const std::string who = describe_id(instance.id);
  if (instance.id.empty()) throw_validation("instance with empty 'id'");
  const std::size_t n = instance.tokens.size();
  if (n == 0) throw_validation(fmt::format("{}: 'tokens' is empty", who));
  if (instance.attributions.empty()) {
    throw_validation(fmt::format("{}: 'attributions' has no methods", who));
  }
  for (const auto& [method, scores] : instance.attributions) {
    if (method.empty()) {
      throw_validation(fmt::format("{}: empty method name in 'attributions'", who));
    }
    if (scores.size() != n) {
      throw_validation(fmt::format(
          "{}: field 'attributions[{}]' has {} entries, expected {}", who,
          method, scores.size(), n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(scores[i])) {
        throw_validation(fmt::format(
            "{}: field 'attributions[{}]' has a non-finite score at position {}",
            who, method, i));
      }
    }
  }
  if (instance.human) {
    if (instance.human->empty()) {
      throw_validation(fmt::format("{}: field 'human' has no annotators", who));
    }
    for (std::size_t a = 0; a < instance.human->size(); ++a) {
      const auto& annotator = (*instance.human)[a];
      if (annotator.size() != n) {
        throw_validation(fmt::format(
            "{}: field 'human[{}]' has {} entries, expected {}", who, a,
            annotator.size(), n));
      }
      for (auto v : annotator) {
        if (v > 1) {
          throw_validation(
              fmt::format("{}: field 'human[{}]' must contain only 0 or 1", who, a));
        }
      }
    }
  }
}

Corpus make_corpus(std::vector<AttributionInstance> instances) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  for (const auto& instance : instances) {
    validate_instance(instance);
    if (!seen.insert(instance.id).second) {
      throw_validation(fmt::format("duplicate instance_id '{}'", instance.id));
    }
  }
  if (!instances.empty()) {
    for (const auto& [method, _] : instances.front().attributions) {
      corpus.method_names.push_back(method);
    }
    for (const auto& instance : instances) {
      bool same = instance.attributions.size() == corpus.method_names.size();
      std::size_t i = 0;
      for (auto it = instance.attributions.begin(); same && it != instance.attributions.end(); ++it) {
        same = it->first == corpus.method_names[i++];
      }
      if (!same) {
        throw_validation(fmt::format(
            "{}: method set differs from the corpus method set",
            describe_id(instance.id)));
      }
    }
  }
  corpus.instances = std::move(instances);
  return corpus;
}

AttributionInstance parse_instance(std::string_view line) {
  json record;
  try {
    record = json::parse(line);
  } catch (const json::exception& e) {
    throw_validation(fmt::format("malformed JSON: {}", e.what()));
  }
  if (!record.is_object()) throw_validation("record is not a JSON object");
  for (const auto& [key, _] : record.items()) {
    if (std::find(std::begin(kKnownFields), std::end(kKnownFields), key) ==
        std::end(kKnownFields)) {
      throw_validation(fmt::format("unknown field '{}'", key));
    }
  }

  AttributionInstance instance;
  const json& id = require_field(record, "id");
  if (!id.is_string()) throw_validation("field 'id' must be a string");
  instance.id = id.get<std::string>();
  const std::string who = describe_id(instance.id);

  const json& tokens = require_field(record, "tokens");
  if (!tokens.is_array()) {
    throw_validation(fmt::format("{}: field 'tokens' must be an array", who));
  }
  for (const auto& token : tokens) {
    if (!token.is_string()) {
      throw_validation(fmt::format("{}: field 'tokens' must hold strings", who));
    }
    instance.tokens.push_back(token.get<std::string>());
  }

  const json& attributions = require_field(record, "attributions");
  if (!attributions.is_object()) {
    throw_validation(fmt::format("{}: field 'attributions' must be an object", who));
  }
  for (const auto& [method, values] : attributions.items()) {
    if (!values.is_array()) {
      throw_validation(fmt::format(
          "{}: field 'attributions[{}]' must be an array", who, method));
    }
    ScoreVector scores;
    scores.reserve(values.size());
    for (const auto& v : values) {
      if (!v.is_number()) {
        throw_validation(fmt::format(
            "{}: field 'attributions[{}]' must hold numbers", who, method));
      }
      scores.push_back(v.get<double>());
    }
    instance.attributions.emplace(method, std::move(scores));
  }

  if (auto it = record.find("human"); it != record.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw_validation(fmt::format("{}: field 'human' must be an array", who));
    }
    std::vector<AnnotatorVector> annotators;
    for (std::size_t a = 0; a < it->size(); ++a) {
      const json& row = (*it)[a];
      if (!row.is_array()) {
        throw_validation(fmt::format("{}: field 'human[{}]' must be an array", who, a));
      }
      AnnotatorVector selection;
      selection.reserve(row.size());
      for (const auto& v : row) {
        if (!v.is_number() || (v.get<double>() != 0.0 && v.get<double>() != 1.0)) {
          throw_validation(fmt::format(
              "{}: field 'human[{}]' must contain only 0 or 1", who, a));
        }
        selection.push_back(v.get<double>() == 1.0 ? 1 : 0);
      }
      annotators.push_back(std::move(selection));
    }
    instance.human = std::move(annotators);
  }
  instance.gold_label = optional_string(record, "gold_label", instance.id);
  instance.predicted_label = optional_string(record, "predicted_label", instance.id);

  validate_instance(instance);
  return instance;
}

std::string serialize_instance(const AttributionInstance& instance) {
  nlohmann::ordered_json record;
  record["id"] = instance.id;
  record["tokens"] = instance.tokens;
  nlohmann::ordered_json attributions = nlohmann::ordered_json::object();
  for (const auto& [method, scores] : instance.attributions) {
    attributions[method] = scores;
  }
  record["attributions"] = std::move(attributions);
  if (instance.human) {
    nlohmann::ordered_json human = nlohmann::ordered_json::array();
    for (const auto& annotator : *instance.human) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (auto v : annotator) row.push_back(static_cast<int>(v));
      human.push_back(std::move(row));
    }
    record["human"] = std::move(human);
  }
  if (instance.gold_label) record["gold_label"] = *instance.gold_label;
  if (instance.predicted_label) record["predicted_label"] = *instance.predicted_label;
  return record.dump();
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& instance : corpus.instances) {
    out += serialize_instance(instance);
    out += '\n';
  }
  return out;
}

LoadResult read_corpus(std::istream& in, Strictness strictness) {
  LoadResult result;
  std::uint64_t checksum = fnv1a64({});
  std::vector<AttributionInstance> accepted;
  std::unordered_set<std::string> seen;
  std::optional<std::vector<std::string>> method_set;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    checksum = fnv1a64(line, checksum);
    if (!in.eof()) checksum = fnv1a64("\n", checksum);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    try {
      AttributionInstance instance = parse_instance(line);
      std::vector<std::string> methods;
      for (const auto& [method, _] : instance.attributions) methods.push_back(method);
      if (!method_set) {
        method_set = methods;
      } else if (*method_set != methods) {
        throw_validation(fmt::format(
            "{}: method set differs from the corpus method set",
            describe_id(instance.id)));
      }
      if (seen.contains(instance.id)) {
        throw_validation(fmt::format("duplicate instance_id '{}'", instance.id));
      }
      seen.insert(instance.id);
      accepted.push_back(std::move(instance));
    } catch (const Error& e) {
      if (strictness == Strictness::kStrict) {
        throw_validation(fmt::format("line {}: {}", line_number, e.what()));
      }
      ++result.skipped;
    }
  }
  if (in.bad()) throw_io("read error while loading corpus");

  result.corpus.instances = std::move(accepted);
  if (method_set) result.corpus.method_names = std::move(*method_set);
  result.checksum = checksum;
  return result;
}

LoadResult load_corpus(const std::filesystem::path& path, Strictness strictness) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io(fmt::format("cannot open corpus file '{}'", path.string()));
  return read_corpus(in, strictness);
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io(fmt::format("cannot open '{}' for writing", path.string()));
  out << serialize_corpus(corpus);
  if (!out) throw_io(fmt::format("write to '{}' failed", path.string()));
}

std::set<std::string> default_punctuation_set() {
  std::set<std::string> set;
  for (char c = 0x21; c < 0x7f; ++c) {
    if (std::ispunct(static_cast<unsigned char>(c))) set.insert(std::string(1, c));
  }
  return set;
}

AttributionInstance zero_punctuation(AttributionInstance instance,
                                     const std::set<std::string>& punctuation) {
  if (!instance.human || punctuation.empty()) return instance;
  for (std::size_t i = 0; i < instance.tokens.size(); ++i) {
    if (!punctuation.contains(instance.tokens[i])) continue;
    for (auto& annotator : *instance.human) annotator[i] = 0;
  }
  return instance;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) noexcept {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

KSpec KSpec::fixed(std::size_t k) {
  if (k == 0) throw_usage("fixed k must be >= 1");
  return KSpec{Mode::kFixed, k};
}

std::string KSpec::describe() const {
  return is_dynamic() ? std::string("dynamic") : fmt::format("fixed:{}", k);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::size_t parse_positive(std::string_view text, std::string_view context) {
  text = trim(text);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
    throw_usage(fmt::format("invalid k '{}' in '{}': expected a positive integer",
                            text, context));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<KSpec> parse_kspecs(std::string_view text) {
  std::vector<KSpec> specs;
  for (auto item : split(text, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item == "dynamic") {
      specs.push_back(KSpec::dynamic());
      continue;
    }
    if (!item.starts_with("fixed:")) {
      throw_usage(fmt::format("invalid k spec '{}': expected 'fixed:N' or 'dynamic'", item));
    }
    for (auto part : split(item.substr(6), ',')) {
      const auto dash = part.find('-');
      if (dash == std::string_view::npos) {
        specs.push_back(KSpec::fixed(parse_positive(part, item)));
        continue;
      }
      const std::size_t lo = parse_positive(part.substr(0, dash), item);
      const std::size_t hi = parse_positive(part.substr(dash + 1), item);
      if (hi < lo) throw_usage(fmt::format("empty k range in '{}'", item));
      for (std::size_t k = lo; k <= hi; ++k) specs.push_back(KSpec::fixed(k));
    }
  }
  if (specs.empty()) throw_usage("no k spec given");
  return specs;
}

}  // namespace dynk
