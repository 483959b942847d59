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

#include "core/synthetic.hpp"

#include <array>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "core/error.hpp"
#include "core/topk.hpp"

namespace dynk {

namespace {

// std::*_distribution output is implementation-defined; these are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t bound) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(bound));
  }

  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

constexpr std::array<const char*, 24> kVocabulary = {
    "a",     "man",    "woman", "is",     "reading", "paper", "to",     "argue",
    "the",   "dog",    "runs",  "in",     "park",    "two",   "people", "sit",
    "on",    "bench",  "suit",  "lady",   "walks",   "street", "child", "plays"};

constexpr std::array<const char*, 3> kLabels = {"entailment", "neutral",
                                                "contradiction"};

double round6(double x) { return std::round(x * 1e6) / 1e6; }

}  // namespace

Corpus make_synthetic_corpus(const SyntheticConfig& config) {
  if (config.methods == 0) throw_usage("synthetic corpus needs at least one method");
  if (config.min_length == 0 || config.max_length < config.min_length) {
    throw_usage("invalid synthetic length range");
  }

  std::vector<std::string> method_names;
  for (std::size_t m = 0; m < config.methods; ++m) {
    method_names.push_back(fmt::format("method_{}", m + 1));
  }

  std::vector<AttributionInstance> instances;
  instances.reserve(config.instances);
  Rng structure(splitmix64(config.seed));
  for (std::size_t i = 0; i < config.instances; ++i) {
    AttributionInstance instance;
    instance.id = fmt::format("syn-{:05d}", i);
    const std::size_t n =
        config.min_length + structure.below(config.max_length - config.min_length + 1);
    for (std::size_t t = 0; t + 1 < n; ++t) {
      instance.tokens.emplace_back(kVocabulary[structure.below(kVocabulary.size())]);
    }
    instance.tokens.emplace_back(".");

    std::vector<double> latent(n, 0.0);
    const std::size_t bumps = 1 + structure.below(4);
    for (std::size_t b = 0; b < bumps; ++b) {
      const double center = static_cast<double>(structure.below(n));
      const double height = 0.4 + 0.6 * structure.uniform();
      const double width = 0.6 + 1.4 * structure.uniform();
      for (std::size_t t = 0; t < n; ++t) {
        const double d = (static_cast<double>(t) - center) / width;
        latent[t] += height * std::exp(-0.5 * d * d);
      }
    }

    if (config.annotators > 0) {
      std::vector<AnnotatorVector> human;
      for (std::size_t a = 0; a < config.annotators; ++a) {
        AnnotatorVector selection(n, 0);
        for (std::size_t t = 0; t + 1 < n; ++t) {
          selection[t] = latent[t] + 0.15 * structure.normal() > 0.55 ? 1 : 0;
        }
        human.push_back(std::move(selection));
      }
      instance.human = std::move(human);
    }
    instance.gold_label = kLabels[structure.below(kLabels.size())];

    for (std::size_t m = 0; m < config.methods; ++m) {
      Rng method_rng(splitmix64(config.seed ^ splitmix64(i * 1315423911ULL + m + 1)));
      Rng run_rng(splitmix64(splitmix64(config.seed + config.run) ^ (i * 2654435761ULL + m)));
      // Methods differ in gain, noise level and smoothing of the latent profile.
      const double gain = 0.5 + 0.1 * static_cast<double>(m % 3);
      const double noise = 0.05 + 0.04 * static_cast<double>(m);
      const double run_noise =
          config.run == 0 ? 0.0 : 0.002 * static_cast<double>(1 + (config.run * 7) % 5);
      const bool smooth = m % 2 == 1;
      ScoreVector scores(n);
      for (std::size_t t = 0; t < n; ++t) {
        double value = latent[t];
        if (smooth) {
          const double left = t > 0 ? latent[t - 1] : latent[t];
          const double right = t + 1 < n ? latent[t + 1] : latent[t];
          value = 0.25 * left + 0.5 * latent[t] + 0.25 * right;
        }
        scores[t] = round6(gain * value + noise * method_rng.normal() +
                           run_noise * run_rng.normal());
      }
      instance.attributions.emplace(method_names[m], std::move(scores));
    }
    instances.push_back(std::move(instance));
  }
  return make_corpus(std::move(instances));
}

}  // namespace dynk
