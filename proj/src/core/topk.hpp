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

#ifndef DYNK_CORE_TOPK_HPP_
#define DYNK_CORE_TOPK_HPP_

// Fixed and dynamic (peak-based) top-k token selection over one attribution
// profile.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "core/profile.hpp"

namespace dynk {

// How ties at the selection boundary are ordered.
struct TieBreak {
  enum class Kind { kEarliestIndex, kSeededRandom };

  Kind kind = Kind::kEarliestIndex;
  std::uint64_t seed = 0;

  static TieBreak earliest() noexcept { return {}; }
  static TieBreak seeded(std::uint64_t seed) noexcept {
    return {Kind::kSeededRandom, seed};
  }

  // Same kind, seed mixed with (a, b) so that every (instance, method) pair
  // draws an independent, reproducible order.
  TieBreak derive(std::uint64_t a, std::uint64_t b) const noexcept;

  bool operator==(const TieBreak&) const = default;
};

struct TopKSelection {
  // Ascending token positions.
  std::vector<std::size_t> indices;
  std::size_t k = 0;
  KSpec mode;
  bool fallback_used = false;

  bool contains(std::size_t index) const;
  bool operator==(const TopKSelection&) const = default;
};

// The min(k, n) highest-scoring positions.
TopKSelection fixed_topk(std::span<const double> scores, std::size_t k,
                         TieBreak tie = TieBreak::earliest());

// Interior positions strictly above both neighbours and strictly above the
// profile mean. Boundary positions are never peaks.
std::vector<std::size_t> detect_peaks(std::span<const double> scores);

// The peak set, or the earliest global argmax when there are no peaks.
TopKSelection dynamic_topk(std::span<const double> scores);

TopKSelection select_topk(std::span<const double> scores, const KSpec& spec,
                          TieBreak tie = TieBreak::earliest());

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace dynk

#endif  // DYNK_CORE_TOPK_HPP_
