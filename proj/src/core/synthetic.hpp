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

#ifndef DYNK_CORE_SYNTHETIC_HPP_
#define DYNK_CORE_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>

#include "core/profile.hpp"

namespace dynk {

// Seeded synthetic corpus: sentences with a latent salience profile, one
// noisy view of it per method, and binary annotators thresholding it.
// Tokens, lengths and annotations depend only on `seed`; `run` adds
// run-specific score noise so that several runs over the same sentences can
// be compared with APD. Output is bit-identical across platforms.
struct SyntheticConfig {
  std::uint64_t seed = 42;
  std::size_t instances = 1000;
  std::size_t methods = 6;
  std::uint32_t run = 0;
  std::size_t annotators = 3;
  std::size_t min_length = 5;
  std::size_t max_length = 40;
};

Corpus make_synthetic_corpus(const SyntheticConfig& config);

}  // namespace dynk

#endif  // DYNK_CORE_SYNTHETIC_HPP_
