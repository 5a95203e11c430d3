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

#ifndef PLANTED_GRAPHGEN_H_
#define PLANTED_GRAPHGEN_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "planted/spectral.h"
#include "planted/types.h"

namespace planted {

// Ground-truth clustering of n vertices into k clusters of exactly s
// vertices each. The assignment may be any layout; nothing downstream
// assumes clusters are contiguous.
class PlantedPartition {
 public:
  // Validates that `assignment` uses cluster ids 0..k-1 with every id
  // occurring equally often. Throws kZeroSize for an empty assignment and
  // kInvalidParams for unbalanced or non-contiguous ids.
  explicit PlantedPartition(std::vector<std::int64_t> assignment);

  Vertex n() const noexcept { return static_cast<Vertex>(assignment_.size()); }
  std::int64_t k() const noexcept { return k_; }
  std::int64_t s() const noexcept { return s_; }

  std::int64_t cluster_of(Vertex v) const { return assignment_[static_cast<std::size_t>(v)]; }
  const std::vector<std::int64_t>& assignment() const noexcept { return assignment_; }

  // Vertices of cluster i, ascending.
  const VertexSet& members(std::int64_t i) const { return members_[static_cast<std::size_t>(i)]; }

  // Relabels vertices: vertex v of the result belongs to the cluster of
  // perm[v] here. perm must be a permutation of 0..n-1.
  PlantedPartition permuted(std::span<const Vertex> perm) const;

  // Vertices (ascending) of the union of the listed clusters.
  VertexSet union_of(std::span<const std::int64_t> clusters) const;

  // The partition induced on `vertices` (ascending, must be a union of
  // whole clusters). Cluster ids are compacted in order of first
  // appearance. Throws kInvalidParams otherwise.
  PlantedPartition restricted(std::span<const Vertex> vertices) const;

  friend bool operator==(const PlantedPartition& a, const PlantedPartition& b) {
    return a.assignment_ == b.assignment_;
  }

 private:
  std::vector<std::int64_t> assignment_;
  std::int64_t k_ = 0;
  std::int64_t s_ = 0;
  std::vector<VertexSet> members_;
};

// Canonical layout: vertices i*s .. i*s + s - 1 form cluster i.
// Throws kZeroSize when s == 0 (or n == 0) and kNonDivisible when s does
// not divide n.
PlantedPartition make_partition(std::int64_t n, std::int64_t s);

struct ModelParams {
  double p = 0.0;  // intra-cluster edge probability
  double q = 0.0;  // inter-cluster edge probability
  std::uint64_t seed = 0;

  // Throws kInvalidParams unless 0 <= q < p <= 1.
  void validate() const;
};

// Simple undirected graph on vertices 0..n-1, stored as bit-packed
// adjacency rows. Symmetric with an empty diagonal by construction.
class Graph {
 public:
  Graph() = default;
  explicit Graph(Vertex n);

  static Graph from_edges(Vertex n, std::span<const std::pair<Vertex, Vertex>> edges);

  Vertex n() const noexcept { return n_; }

  bool has_edge(Vertex u, Vertex v) const {
    return (row(u)[static_cast<std::size_t>(v) >> 6] >> (static_cast<std::size_t>(v) & 63)) & 1ULL;
  }

  // Adds {u, v}. Self loops are rejected with kInvalidParams.
  void add_edge(Vertex u, Vertex v);

  std::int64_t degree(Vertex v) const;
  std::int64_t edge_count() const;

  // Edges as (u, v) with u < v, lexicographic order.
  std::vector<std::pair<Vertex, Vertex>> edges() const;

  // |N(v) ∩ mask| for a mask built with make_mask().
  std::int64_t neighbors_in(Vertex v, std::span<const std::uint64_t> mask) const;

  // |N(u) ∩ N(v)|.
  std::int64_t common_neighbors(Vertex u, Vertex v) const;

  // Bit mask over this graph's vertices with the given members set.
  std::vector<std::uint64_t> make_mask(std::span<const Vertex> members) const;

  std::span<const std::uint64_t> row(Vertex v) const {
    return {bits_.data() + static_cast<std::size_t>(v) * words_, words_};
  }

  // Adjacency as a dense 0-1 matrix.
  SymMatrix to_matrix() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.bits_ == b.bits_;
  }

 private:
  std::uint64_t* mutable_row(Vertex v) {
    return bits_.data() + static_cast<std::size_t>(v) * words_;
  }

  Vertex n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

// Draws a graph from the planted partition model: each pair {i, j} is an
// edge with probability p inside a cluster and q across. The draw for a
// pair depends only on (seed, min, max) of the pair's vertex ids, so the
// sample is fully determined by the seed.
Graph sample_graph(const PlantedPartition& part, const ModelParams& params);

// As sample_graph, but local vertex v draws its pairs under the id
// `vertex_ids[v]`. Sampling a restricted partition with the original ids
// reproduces the corresponding principal submatrix of the full sample.
Graph sample_graph_with_ids(const PlantedPartition& part, const ModelParams& params,
                            std::span<const Vertex> vertex_ids);

// G = E[Ĝ] + pI: p for same-cluster pairs (diagonal included), q otherwise.
SymMatrix expectation_matrix(const PlantedPartition& part, const ModelParams& params);

// H: 1 for same-cluster pairs (diagonal included), 0 otherwise.
SymMatrix true_cluster_matrix(const PlantedPartition& part);

// Induced subgraph on the vertex set S. S is taken in ascending order
// (duplicates ignored), so local vertex i is the i-th smallest member.
// Throws kEmptySet.
Graph principal_submatrix(const Graph& g, std::span<const Vertex> vertices);

}  // namespace planted

#endif  // PLANTED_GRAPHGEN_H_
