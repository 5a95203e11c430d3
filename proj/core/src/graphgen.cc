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

#include "planted/graphgen.h"

#include <algorithm>
#include <bit>
#include <string>

#include "planted/error.h"
#include "planted/random.h"

namespace planted {
namespace {

VertexSet sorted_unique(std::span<const Vertex> vertices) {
  VertexSet out(vertices.begin(), vertices.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

PlantedPartition::PlantedPartition(std::vector<std::int64_t> assignment)
    : assignment_(std::move(assignment)) {
  if (assignment_.empty()) {
    throw Error(ErrorCode::kZeroSize, "partition has no vertices");
  }
  const auto [lo, hi] = std::minmax_element(assignment_.begin(), assignment_.end());
  if (*lo < 0) {
    throw Error(ErrorCode::kInvalidParams, "negative cluster id");
  }
  k_ = *hi + 1;
  const auto n = static_cast<std::int64_t>(assignment_.size());
  if (n % k_ != 0) {
    throw Error(ErrorCode::kInvalidParams,
                "cluster ids 0.." + std::to_string(k_ - 1) + " cannot be balanced over " +
                    std::to_string(n) + " vertices");
  }
  s_ = n / k_;
  members_.assign(static_cast<std::size_t>(k_), {});
  for (Vertex v = 0; v < n; ++v) {
    members_[static_cast<std::size_t>(assignment_[static_cast<std::size_t>(v)])].push_back(v);
  }
  for (std::int64_t i = 0; i < k_; ++i) {
    if (static_cast<std::int64_t>(members_[static_cast<std::size_t>(i)].size()) != s_) {
      throw Error(ErrorCode::kInvalidParams,
                  "cluster " + std::to_string(i) + " has " +
                      std::to_string(members_[static_cast<std::size_t>(i)].size()) +
                      " vertices, expected " + std::to_string(s_));
    }
  }
}

PlantedPartition PlantedPartition::permuted(std::span<const Vertex> perm) const {
  if (static_cast<Vertex>(perm.size()) != n()) {
    throw Error(ErrorCode::kDimensionMismatch, "permutation length differs from n");
  }
  std::vector<bool> seen(perm.size(), false);
  std::vector<std::int64_t> out(perm.size());
  for (std::size_t v = 0; v < perm.size(); ++v) {
    const Vertex src = perm[v];
    if (src < 0 || src >= n() || seen[static_cast<std::size_t>(src)]) {
      throw Error(ErrorCode::kInvalidParams, "not a permutation");
    }
    seen[static_cast<std::size_t>(src)] = true;
    out[v] = cluster_of(src);
  }
  return PlantedPartition(std::move(out));
}

VertexSet PlantedPartition::union_of(std::span<const std::int64_t> clusters) const {
  VertexSet out;
  for (const std::int64_t c : clusters) {
    if (c < 0 || c >= k_) {
      throw Error(ErrorCode::kInvalidParams, "cluster id out of range");
    }
    const VertexSet& m = members(c);
    out.insert(out.end(), m.begin(), m.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PlantedPartition PlantedPartition::restricted(std::span<const Vertex> vertices) const {
  const VertexSet sorted = sorted_unique(vertices);
  if (sorted.empty()) {
    throw Error(ErrorCode::kEmptySet, "restriction to an empty vertex set");
  }
  std::vector<std::int64_t> relabel(static_cast<std::size_t>(k_), -1);
  std::vector<std::int64_t> seen_count(static_cast<std::size_t>(k_), 0);
  std::vector<std::int64_t> out;
  out.reserve(sorted.size());
  std::int64_t next = 0;
  for (const Vertex v : sorted) {
    if (v < 0 || v >= n()) {
      throw Error(ErrorCode::kInvalidParams, "vertex out of range");
    }
    const auto c = static_cast<std::size_t>(cluster_of(v));
    if (relabel[c] < 0) relabel[c] = next++;
    ++seen_count[c];
    out.push_back(relabel[c]);
  }
  for (std::size_t c = 0; c < seen_count.size(); ++c) {
    if (seen_count[c] != 0 && seen_count[c] != s_) {
      throw Error(ErrorCode::kInvalidParams, "restriction splits a cluster");
    }
  }
  return PlantedPartition(std::move(out));
}

PlantedPartition make_partition(std::int64_t n, std::int64_t s) {
  if (s <= 0 || n <= 0) {
    throw Error(ErrorCode::kZeroSize, "cluster size and vertex count must be positive");
  }
  if (n % s != 0) {
    throw Error(ErrorCode::kNonDivisible,
                "cluster size " + std::to_string(s) + " does not divide n = " + std::to_string(n));
  }
  std::vector<std::int64_t> assignment(static_cast<std::size_t>(n));
  for (std::int64_t v = 0; v < n; ++v) assignment[static_cast<std::size_t>(v)] = v / s;
  return PlantedPartition(std::move(assignment));
}

void ModelParams::validate() const {
  if (!(0.0 <= q && q < p && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidParams,
                "edge probabilities must satisfy 0 <= q < p <= 1 (p = " + std::to_string(p) +
                    ", q = " + std::to_string(q) + ")");
  }
}

Graph::Graph(Vertex n)
    : n_(n), words_((static_cast<std::size_t>(n) + 63) / 64),
      bits_(words_ * static_cast<std::size_t>(n), 0) {
  if (n < 0) throw Error(ErrorCode::kSizeOutOfRange, "negative vertex count");
}

Graph Graph::from_edges(Vertex n, std::span<const std::pair<Vertex, Vertex>> edges) {
  Graph g(n);
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

void Graph::add_edge(Vertex u, Vertex v) {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) {
    throw Error(ErrorCode::kSizeOutOfRange, "edge endpoint out of range");
  }
  if (u == v) throw Error(ErrorCode::kInvalidParams, "self loop");
  mutable_row(u)[static_cast<std::size_t>(v) >> 6] |= 1ULL << (static_cast<std::size_t>(v) & 63);
  mutable_row(v)[static_cast<std::size_t>(u) >> 6] |= 1ULL << (static_cast<std::size_t>(u) & 63);
}

std::int64_t Graph::degree(Vertex v) const {
  std::int64_t d = 0;
  for (const std::uint64_t w : row(v)) d += std::popcount(w);
  return d;
}

std::int64_t Graph::edge_count() const {
  std::int64_t twice = 0;
  for (const std::uint64_t w : bits_) twice += std::popcount(w);
  return twice / 2;
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (Vertex u = 0; u < n_; ++u) {
    for (Vertex v = u + 1; v < n_; ++v) {
      if (has_edge(u, v)) out.emplace_back(u, v);
    }
  }
  return out;
}

std::int64_t Graph::neighbors_in(Vertex v, std::span<const std::uint64_t> mask) const {
  const auto r = row(v);
  std::int64_t count = 0;
  for (std::size_t i = 0; i < words_; ++i) count += std::popcount(r[i] & mask[i]);
  return count;
}

std::int64_t Graph::common_neighbors(Vertex u, Vertex v) const {
  return neighbors_in(u, row(v));
}

std::vector<std::uint64_t> Graph::make_mask(std::span<const Vertex> members) const {
  std::vector<std::uint64_t> mask(words_, 0);
  for (const Vertex v : members) {
    if (v < 0 || v >= n_) throw Error(ErrorCode::kSizeOutOfRange, "mask member out of range");
    mask[static_cast<std::size_t>(v) >> 6] |= 1ULL << (static_cast<std::size_t>(v) & 63);
  }
  return mask;
}

SymMatrix Graph::to_matrix() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (Vertex j = 0; j < n_; ++j) {
    for (Vertex i = 0; i < n_; ++i) {
      if (has_edge(i, j)) m(i, j) = 1.0;
    }
  }
  return SymMatrix(m);
}

Graph sample_graph(const PlantedPartition& part, const ModelParams& params) {
  std::vector<Vertex> ids(static_cast<std::size_t>(part.n()));
  for (Vertex v = 0; v < part.n(); ++v) ids[static_cast<std::size_t>(v)] = v;
  return sample_graph_with_ids(part, params, ids);
}

Graph sample_graph_with_ids(const PlantedPartition& part, const ModelParams& params,
                            std::span<const Vertex> vertex_ids) {
  params.validate();
  if (static_cast<Vertex>(vertex_ids.size()) != part.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "vertex id list length differs from n");
  }
  const Vertex n = part.n();
  Graph g(n);
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex j = i + 1; j < n; ++j) {
      const double prob = part.cluster_of(i) == part.cluster_of(j) ? params.p : params.q;
      // Draws lie in [0, 1), so these two cases need no draw.
      if (prob >= 1.0) {
        g.add_edge(i, j);
        continue;
      }
      if (prob <= 0.0) continue;
      const double u = pair_uniform(params.seed, vertex_ids[static_cast<std::size_t>(i)],
                                    vertex_ids[static_cast<std::size_t>(j)]);
      if (u < prob) g.add_edge(i, j);
    }
  }
  return g;
}

SymMatrix expectation_matrix(const PlantedPartition& part, const ModelParams& params) {
  params.validate();
  const Vertex n = part.n();
  Eigen::MatrixXd m(n, n);
  for (Vertex j = 0; j < n; ++j) {
    for (Vertex i = 0; i < n; ++i) {
      m(i, j) = part.cluster_of(i) == part.cluster_of(j) ? params.p : params.q;
    }
  }
  return SymMatrix(m);
}

SymMatrix true_cluster_matrix(const PlantedPartition& part) {
  const Vertex n = part.n();
  Eigen::MatrixXd m(n, n);
  for (Vertex j = 0; j < n; ++j) {
    for (Vertex i = 0; i < n; ++i) {
      m(i, j) = part.cluster_of(i) == part.cluster_of(j) ? 1.0 : 0.0;
    }
  }
  return SymMatrix(m);
}

Graph principal_submatrix(const Graph& g, std::span<const Vertex> vertices) {
  const VertexSet sorted = sorted_unique(vertices);
  if (sorted.empty()) {
    throw Error(ErrorCode::kEmptySet, "principal_submatrix of an empty set");
  }
  for (const Vertex v : sorted) {
    if (v < 0 || v >= g.n()) {
      throw Error(ErrorCode::kSizeOutOfRange, "principal_submatrix vertex out of range");
    }
  }
  const auto m = static_cast<Vertex>(sorted.size());
  std::vector<Vertex> local(static_cast<std::size_t>(g.n()), -1);
  for (Vertex i = 0; i < m; ++i) local[static_cast<std::size_t>(sorted[static_cast<std::size_t>(i)])] = i;
  const std::vector<std::uint64_t> keep = g.make_mask(sorted);
  Graph out(m);
  for (Vertex i = 0; i < m; ++i) {
    const auto row = g.row(sorted[static_cast<std::size_t>(i)]);
    for (std::size_t w = 0; w < row.size(); ++w) {
      std::uint64_t bits = row[w] & keep[w];
      while (bits != 0) {
        const auto v = static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
        const Vertex j = local[static_cast<std::size_t>(v)];
        if (j > i) out.add_edge(i, j);
      }
    }
  }
  return out;
}

}  // namespace planted
