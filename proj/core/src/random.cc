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

#include "planted/random.h"

#include <numeric>
#include <utility>

namespace planted {

double pair_uniform(std::uint64_t seed, Vertex a, Vertex b) noexcept {
  if (a > b) std::swap(a, b);
  std::uint64_t x = mix64(seed);
  x = mix64(x ^ static_cast<std::uint64_t>(a));
  x = mix64(x ^ (static_cast<std::uint64_t>(b) * 0xd6e8feb86659fd93ULL));
  return to_unit_interval(x);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  // Lemire-style threshold: reject the low residue class.
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = (*this)();
    if (r >= threshold) return r % bound;
  }
}

std::vector<Vertex> random_permutation(Vertex n, std::uint64_t seed) {
  std::vector<Vertex> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Vertex{0});
  SplitMix64 rng(seed);
  for (Vertex i = n - 1; i > 0; --i) {
    const auto j = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  return perm;
}

std::uint64_t trial_seed(std::uint64_t seed0, std::uint64_t cell,
                         std::uint64_t trial) noexcept {
  // (cell, trial) packs injectively into one word; adding a constant and
  // applying the bijective finalizer keeps it injective.
  const std::uint64_t packed = (cell << 32) | (trial & 0xffffffffULL);
  return mix64(mix64(seed0) + packed);
}

}  // namespace planted
