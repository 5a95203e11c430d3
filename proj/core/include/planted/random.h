// Copyright 2026 The planted Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PLANTED_RANDOM_H_
#define PLANTED_RANDOM_H_

#include <cstdint>
#include <limits>
#include <vector>

#include "planted/types.h"

namespace planted {

// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Maps the top 53 bits of a word to a double in [0, 1).
constexpr double to_unit_interval(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Counter-based draw for the unordered pair {a, b}: a pure function of
// (seed, min(a, b), max(a, b)), uniform on [0, 1).
double pair_uniform(std::uint64_t seed, Vertex a, Vertex b) noexcept;

// Small sequential generator (SplitMix64 stream). Satisfies
// UniformRandomBitGenerator so it can drive <random> distributions, but the
// library's own helpers below avoid implementation-defined distributions so
// results are identical across standard libraries.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t out = mix64(state_);
    state_ += 0x9e3779b97f4a7c15ULL;
    return out;
  }

  double uniform() noexcept { return to_unit_interval((*this)()); }

  // Unbiased integer in [0, bound) by rejection. bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

// Uniformly random permutation of 0..n-1 (Fisher-Yates).
std::vector<Vertex> random_permutation(Vertex n, std::uint64_t seed);

// Seed for trial `trial` of grid cell `cell`. Injective in (cell, trial) for
// indices below 2^32 at fixed seed0.
std::uint64_t trial_seed(std::uint64_t seed0, std::uint64_t cell,
                         std::uint64_t trial) noexcept;

}  // namespace planted

#endif  // PLANTED_RANDOM_H_
