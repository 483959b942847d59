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

#ifndef DYNK_CORE_RUN_SELECTOR_HPP_
#define DYNK_CORE_RUN_SELECTOR_HPP_

// Average pairwise difference (APD) between the attribution matrices of
// several model runs, and selection of the lowest-APD ("median") run.

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "core/profile.hpp"

namespace dynk {

// Row-major (instances x methods) x max_length matrix. Rows follow corpus
// order, then sorted method names; shorter rows are padded with 0.
struct RunMatrix {
  std::string run_id;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t row, std::size_t col) const { return values[row * cols + col]; }
};

RunMatrix build_run_matrix(const Corpus& corpus, std::string run_id);

// Mean element-wise |t1 - t2|, accumulated with compensated summation.
double average_difference(const RunMatrix& t1, const RunMatrix& t2);

struct ApdResult {
  std::map<std::string, double> scores;
  std::string selected;
};

// Lowest score; ties go to the lexicographically smallest run id.
std::string select_lowest(const std::map<std::string, double>& scores);

using DistanceFn = std::function<double(const RunMatrix&, const RunMatrix&)>;

// Evaluates `distance` once per unordered pair of runs.
ApdResult apd_select(std::span<const RunMatrix> runs,
                     const DistanceFn& distance = average_difference);

// Throws Error(kValidation) unless every corpus has the same instance ids,
// method names and token counts in the same order.
void check_aligned(std::span<const Corpus> corpora,
                   std::span<const std::string> run_ids);

}  // namespace dynk

#endif  // DYNK_CORE_RUN_SELECTOR_HPP_
