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

#include "core/topk.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "core/error.hpp"

namespace dynk {

namespace {

void check_scores(std::span<const double> scores) {
  if (scores.empty()) throw_usage("score vector is empty");
}

double mean_of(std::span<const double> scores) {
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

TieBreak TieBreak::derive(std::uint64_t a, std::uint64_t b) const noexcept {
  if (kind == Kind::kEarliestIndex) return *this;
  return seeded(splitmix64(splitmix64(seed ^ splitmix64(a)) ^ b));
}

bool TopKSelection::contains(std::size_t index) const {
  return std::binary_search(indices.begin(), indices.end(), index);
}

TopKSelection fixed_topk(std::span<const double> scores, std::size_t k,
                         TieBreak tie) {
  check_scores(scores);
  if (k == 0) throw_usage("fixed k must be >= 1");
  const std::size_t n = scores.size();
  const std::size_t take = std::min(k, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Secondary key among equal scores: position, or a seeded random rank.
  std::vector<std::uint64_t> rank(n);
  if (tie.kind == TieBreak::Kind::kSeededRandom) {
    std::mt19937_64 engine(tie.seed);
    for (auto& r : rank) r = engine();
  } else {
    std::iota(rank.begin(), rank.end(), std::uint64_t{0});
  }

  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      if (rank[a] != rank[b]) return rank[a] < rank[b];
                      return a < b;
                    });
  order.resize(take);
  std::sort(order.begin(), order.end());
  return TopKSelection{std::move(order), take, KSpec::fixed(k), false};
}

std::vector<std::size_t> detect_peaks(std::span<const double> scores) {
  check_scores(scores);
  std::vector<std::size_t> peaks;
  if (scores.size() < 3) return peaks;
  const double mean = mean_of(scores);
  for (std::size_t i = 1; i + 1 < scores.size(); ++i) {
    if (scores[i] > scores[i - 1] && scores[i] > scores[i + 1] && scores[i] > mean) {
      peaks.push_back(i);
    }
  }
  return peaks;
}

TopKSelection dynamic_topk(std::span<const double> scores) {
  auto peaks = detect_peaks(scores);
  if (!peaks.empty()) {
    const std::size_t k = peaks.size();
    return TopKSelection{std::move(peaks), k, KSpec::dynamic(), false};
  }
  const auto argmax = static_cast<std::size_t>(
      std::max_element(scores.begin(), scores.end()) - scores.begin());
  return TopKSelection{{argmax}, 1, KSpec::dynamic(), true};
}

TopKSelection select_topk(std::span<const double> scores, const KSpec& spec,
                          TieBreak tie) {
  return spec.is_dynamic() ? dynamic_topk(scores) : fixed_topk(scores, spec.k, tie);
}

}  // namespace dynk
