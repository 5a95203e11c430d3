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

#include "planted/baseline.h"

#include <algorithm>
#include <bit>
#include <string>
#include <vector>

#include "planted/error.h"

namespace planted {

RecoveryResult baseline_common_neighbors(const Graph& g, std::int64_t s) {
  if (s < 1) throw Error(ErrorCode::kZeroSize, "cluster size must be positive");
  const Vertex n = g.n();
  RecoveryResult result;
  result.s = s;

  VertexSet unassigned(static_cast<std::size_t>(n));
  for (Vertex v = 0; v < n; ++v) unassigned[static_cast<std::size_t>(v)] = v;

  std::vector<std::pair<std::int64_t, Vertex>> ranked;
  while (static_cast<std::int64_t>(unassigned.size()) >= s) {
    const auto mask = g.make_mask(unassigned);
    const Vertex pivot = unassigned.front();
    const auto pivot_row = g.row(pivot);

    ranked.clear();
    for (std::size_t i = 1; i < unassigned.size(); ++i) {
      const Vertex u = unassigned[i];
      const auto row = g.row(u);
      std::int64_t count = 0;
      for (std::size_t w = 0; w < mask.size(); ++w) {
        count += std::popcount(pivot_row[w] & row[w] & mask[w]);
      }
      ranked.emplace_back(count, u);
    }
    const auto take = static_cast<std::ptrdiff_t>(s - 1);
    std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end(),
                      [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first > b.first;
                        return a.second < b.second;
                      });

    VertexSet cluster{pivot};
    for (std::ptrdiff_t i = 0; i < take; ++i) cluster.push_back(ranked[static_cast<std::size_t>(i)].second);
    std::sort(cluster.begin(), cluster.end());

    VertexSet rest;
    rest.reserve(unassigned.size() - cluster.size());
    std::set_difference(unassigned.begin(), unassigned.end(), cluster.begin(), cluster.end(),
                        std::back_inserter(rest));
    unassigned = std::move(rest);
    result.clusters.push_back(std::move(cluster));
  }
  result.leftover = std::move(unassigned);
  return result;
}

}  // namespace planted
