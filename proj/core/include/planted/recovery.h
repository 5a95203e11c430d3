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

#ifndef PLANTED_RECOVERY_H_
#define PLANTED_RECOVERY_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "planted/graphgen.h"
#include "planted/spectral.h"
#include "planted/types.h"

namespace planted {

// An orthogonal projector that is block diagonal over a partition of its
// index space into blocks; entries between different blocks are zero. Each
// block is kept as an orthonormal basis B_b alongside B_b B_b^T, so
// ||P 1_W||_2 = ||sum_{w in W} (row w of the basis)||_2 costs O(|W| rank).
class BlockProjector {
 public:
  BlockProjector() = default;
  // `blocks` must partition 0..n-1, each ascending; bases[b] has
  // |blocks[b]| rows (in block order) and orthonormal columns, possibly none.
  BlockProjector(Vertex n, std::vector<VertexSet> blocks, std::vector<Eigen::MatrixXd> bases);
  // A single block holding every index.
  static BlockProjector from_basis(const Eigen::MatrixXd& basis);

  Eigen::Index dim() const noexcept { return n_; }
  Eigen::Index rank() const noexcept { return rank_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  const VertexSet& block(std::size_t b) const { return blocks_[b]; }
  const Eigen::MatrixXd& block_matrix(std::size_t b) const { return matrices_[b]; }
  const Eigen::MatrixXd& block_basis(std::size_t b) const { return bases_[b]; }
  std::size_t block_of(Vertex v) const { return block_of_[static_cast<std::size_t>(v)]; }
  Eigen::Index position(Vertex v) const { return position_[static_cast<std::size_t>(v)]; }
  double operator()(Vertex i, Vertex j) const;
  // ||P 1_w||_2; 0 for an empty set.
  double column_mass(std::span<const Vertex> w) const;
  Projector to_dense() const;

 private:
  Vertex n_ = 0;
  Eigen::Index rank_ = 0;
  std::vector<VertexSet> blocks_;
  std::vector<Eigen::MatrixXd> bases_;
  std::vector<Eigen::MatrixXd> matrices_;
  std::vector<std::size_t> block_of_;
  std::vector<Eigen::Index> position_;
};

// W_j: the pivot j together with the s-1 indices holding the largest
// off-diagonal entries of column j of a projector. All indices are local
// to the projector's index space.
struct CandidateSet {
  Vertex pivot = 0;
  VertexSet members;  // ascending, contains pivot, size s
  double mass = 0.0;  // ||P 1_members||_2
};

// Builds W_j. Ranking is by entry value, larger first, ties to the smaller
// index; j's own diagonal entry is never ranked. Throws kSizeOutOfRange
// unless 1 <= s <= dim and 0 <= j < dim.
CandidateSet candidate_set(const Projector& p_hat, Vertex j, std::int64_t s);
// Same ranking on a block projector, in time linear in j's block plus the
// number of zero entries it has to skip.
CandidateSet candidate_set(const BlockProjector& p_hat, Vertex j, std::int64_t s);

// W_j for every column j.
std::vector<CandidateSet> candidate_sets(const Projector& p_hat, std::int64_t s);
std::vector<CandidateSet> candidate_sets(const BlockProjector& p_hat, std::int64_t s);

// The pivot with the largest mass, ties to the smaller pivot. Throws
// kEmptySet on an empty list.
Vertex select_pivot(std::span<const CandidateSet> sets);

// The s vertices of `g` (all of them, not only those in w) with the most
// neighbours in w, ties to the smaller index; returned ascending. Throws
// kGraphTooSmall when g has fewer than s vertices and kSizeOutOfRange when
// s < 1.
VertexSet extract_cluster(const Graph& g, std::span<const Vertex> w, std::int64_t s);

// P_l of the adjacency matrix of g. With split_components set, each
// connected component is diagonalised on its own and the l largest
// eigenpairs over all components are combined (ties ordered by component,
// components ordered by smallest vertex) into one block per component.
// This is the same projector as the dense route whenever
// lambda_l > lambda_{l+1}, and much cheaper on disconnected graphs.
BlockProjector graph_top_projector(const Graph& g, std::int64_t l, bool split_components = true);

// Connected components, each ascending, ordered by smallest vertex.
std::vector<VertexSet> connected_components(const Graph& g);

// Read-only view of one recursion level, handed to an observer.
struct LevelView {
  std::int64_t level = 0;
  std::int64_t k = 0;                          // floor(m / s) at this level
  std::span<const Vertex> vertices;            // original ids of the current graph
  const Graph* graph = nullptr;                // current graph, local ids
  const BlockProjector* projector = nullptr;   // P_k of the current graph
  std::span<const CandidateSet> candidates;    // local ids
  Vertex pivot = 0;                            // local id
  const VertexSet* cluster = nullptr;          // extracted cluster, local ids
};

struct RecoveryOptions {
  bool split_components = true;
  // When the current graph has exactly s vertices the extracted cluster is
  // forced to be every vertex; the eigensolve is skipped unless an observer
  // or level records need it.
  bool skip_forced_level = true;
  bool record_levels = true;
  std::function<void(const LevelView&)> observer;
};

struct RecoveryLevel {
  std::int64_t k = 0;
  Vertex pivot = 0;         // original id
  double pivot_mass = 0.0;  // ||P̂ 1_{W_pivot}||_2, NaN when the level was skipped
  VertexSet candidate;      // W_pivot, original ids
};

struct RecoveryResult {
  std::int64_t s = 0;
  std::vector<VertexSet> clusters;  // recovery order, each ascending, original ids
  VertexSet leftover;               // ascending
  std::vector<RecoveryLevel> levels;
};

// Recursive spectral cluster identification, run as a loop: with m
// remaining vertices and k = floor(m / s) >= 1, project onto the top-k
// eigenspace, pick the best candidate set, pull out the s vertices with
// most neighbours in it, and repeat on what remains. Vertices left when
// k drops to 0 are reported in `leftover`. Throws kZeroSize when s < 1.
RecoveryResult identify_clusters(const Graph& g, std::int64_t s,
                                 const RecoveryOptions& options = {});

// True iff `result` reproduces the planted clusters as a set of sets with
// nothing left over.
bool same_partition(const RecoveryResult& result, const PlantedPartition& truth);

}  // namespace planted

#endif  // PLANTED_RECOVERY_H_
