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

#include "core/run_selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "core/error.hpp"

namespace dynk {

namespace {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace

RunMatrix build_run_matrix(const Corpus& corpus, std::string run_id) {
  RunMatrix matrix;
  matrix.run_id = std::move(run_id);
  matrix.rows = corpus.size() * corpus.method_names.size();
  matrix.cols = corpus.max_length();
  matrix.values.assign(matrix.rows * matrix.cols, 0.0);
  std::size_t row = 0;
  for (const auto& instance : corpus.instances) {
    for (const auto& method : corpus.method_names) {
      const auto& scores = instance.scores(method);
      std::copy(scores.begin(), scores.end(),
                matrix.values.begin() + static_cast<std::ptrdiff_t>(row * matrix.cols));
      ++row;
    }
  }
  return matrix;
}

double average_difference(const RunMatrix& t1, const RunMatrix& t2) {
  if (t1.rows != t2.rows || t1.cols != t2.cols) {
    throw_validation(fmt::format("run matrices differ in shape: {}x{} vs {}x{}",
                                 t1.rows, t1.cols, t2.rows, t2.cols));
  }
  if (t1.values.empty()) throw_validation("run matrices are empty");
  CompensatedSum sum;
  for (std::size_t i = 0; i < t1.values.size(); ++i) {
    sum.add(std::fabs(t1.values[i] - t2.values[i]));
  }
  return sum.value() / static_cast<double>(t1.values.size());
}

std::string select_lowest(const std::map<std::string, double>& scores) {
  if (scores.empty()) throw_usage("no run scores to select from");
  // std::map iterates in lexicographic order, so the first minimum wins ties.
  auto best = scores.begin();
  for (auto it = scores.begin(); it != scores.end(); ++it) {
    if (it->second < best->second) best = it;
  }
  return best->first;
}

ApdResult apd_select(std::span<const RunMatrix> runs, const DistanceFn& distance) {
  if (runs.size() < 2) throw_usage("APD selection needs at least 2 runs");
  std::set<std::string> ids;
  for (const auto& run : runs) {
    if (!ids.insert(run.run_id).second) {
      throw_usage(fmt::format("duplicate run id '{}'", run.run_id));
    }
  }

  // Work in run-id order so the result does not depend on input order.
  std::vector<std::size_t> order(runs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return runs[a].run_id < runs[b].run_id;
  });

  const std::size_t p = runs.size();
  std::vector<double> pairwise(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      const double ad = distance(runs[order[i]], runs[order[j]]);
      pairwise[i * p + j] = ad;
      pairwise[j * p + i] = ad;
    }
  }

  ApdResult result;
  for (std::size_t i = 0; i < p; ++i) {
    CompensatedSum sum;
    for (std::size_t j = 0; j < p; ++j) {
      if (j != i) sum.add(pairwise[i * p + j]);
    }
    result.scores[runs[order[i]].run_id] = sum.value() / static_cast<double>(p - 1);
  }
  result.selected = select_lowest(result.scores);
  return result;
}

void check_aligned(std::span<const Corpus> corpora,
                   std::span<const std::string> run_ids) {
  if (corpora.empty()) return;
  const Corpus& reference = corpora.front();
  for (std::size_t r = 1; r < corpora.size(); ++r) {
    const Corpus& other = corpora[r];
    const std::string& who = r < run_ids.size() ? run_ids[r] : std::to_string(r);
    if (other.method_names != reference.method_names) {
      throw_validation(fmt::format("run '{}' has a different method set", who));
    }
    if (other.size() != reference.size()) {
      throw_validation(fmt::format("run '{}' has {} instances, expected {}", who,
                                   other.size(), reference.size()));
    }
    for (std::size_t i = 0; i < reference.size(); ++i) {
      const auto& a = reference.instances[i];
      const auto& b = other.instances[i];
      if (a.id != b.id) {
        throw_validation(fmt::format("run '{}' instance {} is '{}', expected '{}'", who,
                                     i, b.id, a.id));
      }
      if (a.size() != b.size()) {
        throw_validation(fmt::format("run '{}' instance '{}' has {} tokens, expected {}",
                                     who, a.id, b.size(), a.size()));
      }
    }
  }
}

}  // namespace dynk
