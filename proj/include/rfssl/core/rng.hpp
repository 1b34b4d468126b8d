/*
 * Copyright 2026 The rfssl Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string_view>

namespace rfssl {

/// Deterministic pseudo-random source.
///
/// xoshiro256** seeded through SplitMix64. Distributions are implemented here
/// rather than taken from <random> so that a seed reproduces the same stream
/// regardless of the standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /// Independent substream keyed by name ("data", "augment", "init", ...).
  /// Changing how one stream is consumed never perturbs another.
  static Rng substream(std::uint64_t seed, std::string_view name);

  /// Child stream derived from this generator's next output.
  Rng fork();

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer on [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p);
  double normal();
  double normal(double mean, double stddev);
  /// Gamma(shape, 1) via Marsaglia–Tsang.
  double gamma(double shape);

 private:
  std::uint64_t s_[4];
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t hash_name(std::string_view name);

}  // namespace rfssl
