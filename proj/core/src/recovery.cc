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

#include "planted/recovery.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>

#include "planted/error.h"

namespace planted {

CandidateSet candidate_set(const Projector& p_hat, Vertex j, std::int64_t s) {
  const Eigen::Index m = p_hat.dim();
  if (s < 1 || s > m) {
    throw Error(ErrorCode::kSizeOutOfRange,
                "candidate set size " + std::to_string(s) + " outside [1, " + std::to_string(m) + "]");
  }
  if (j < 0 || j >= m) {
    throw Error(ErrorCode::kSizeOutOfRange, "candidate pivot out of range");
  }
  const auto column = p_hat.matrix().dense().col(j);
  std::vector<Vertex> others;
  others.reserve(static_cast<std::size_t>(m - 1));
  for (Vertex i = 0; i < m; ++i) {
    if (i != j) others.push_back(i);
  }
  const auto take = static_cast<std::ptrdiff_t>(s - 1);
  std::partial_sort(others.begin(), others.begin() + take, others.end(),
                    [&](Vertex a, Vertex b) {
                      if (column(a) != column(b)) return column(a) > column(b);
                      return a < b;
                    });
  CandidateSet out;
  out.pivot = j;
  out.members.assign(others.begin(), others.begin() + take);
  out.members.push_back(j);
  std::sort(out.members.begin(), out.members.end());
  out.mass = projector_column_mass(p_hat, out.members);
  return out;
}

std::vector<CandidateSet> candidate_sets(const Projector& p_hat, std::int64_t s) {
  std::vector<CandidateSet> out;
  out.reserve(static_cast<std::size_t>(p_hat.dim()));
  for (Vertex j = 0; j < p_hat.dim(); ++j) out.push_back(candidate_set(p_hat, j, s));
  return out;
}

BlockProjector::BlockProjector(Vertex n, std::vector<VertexSet> blocks,
                               std::vector<Eigen::MatrixXd> bases)
    : n_(n),
      blocks_(std::move(blocks)),
      bases_(std::move(bases)),
      block_of_(static_cast<std::size_t>(n), blocks_.size()),
      position_(static_cast<std::size_t>(n), -1) {
  if (blocks_.size() != bases_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one basis per block required");
  }
  matrices_.reserve(blocks_.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto size = static_cast<Eigen::Index>(blocks_[b].size());
    if (bases_[b].rows() != size || bases_[b].cols() > size) {
      throw Error(ErrorCode::kDimensionMismatch, "basis does not match its block");
    }
    for (Eigen::Index i = 0; i < size; ++i) {
      const Vertex v = blocks_[b][static_cast<std::size_t>(i)];
      if (v < 0 || v >= n || block_of_[static_cast<std::size_t>(v)] != blocks_.size()) {
        throw Error(ErrorCode::kInvalidParams, "blocks must partition the index space");
      }
      block_of_[static_cast<std::size_t>(v)] = b;
      position_[static_cast<std::size_t>(v)] = i;
    }
    rank_ += bases_[b].cols();
    matrices_.push_back(bases_[b] * bases_[b].transpose());
  }
  for (const std::size_t b : block_of_) {
    if (b == blocks_.size()) throw Error(ErrorCode::kInvalidParams, "blocks must cover every index");
  }
}

BlockProjector BlockProjector::from_basis(const Eigen::MatrixXd& basis) {
  VertexSet all(static_cast<std::size_t>(basis.rows()));
  std::iota(all.begin(), all.end(), Vertex{0});
  return BlockProjector(basis.rows(), {std::move(all)}, {basis});
}

double BlockProjector::column_mass(std::span<const Vertex> w) const {
  // P = B B^T per block with orthonormal B, so ||P 1_W|| = ||B^T 1_W||.
  if (w.empty()) return 0.0;
  const std::size_t first = block_of(w.front());
  if (std::all_of(w.begin(), w.end(), [&](Vertex v) { return block_of(v) == first; })) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(bases_[first].cols());
    for (const Vertex v : w) sum += bases_[first].row(position(v)).transpose();
    return sum.norm();
  }
  std::vector<std::size_t> touched;
  std::vector<Eigen::VectorXd> sums;
  for (const Vertex v : w) {
    const std::size_t b = block_of(v);
    std::size_t slot = 0;
    while (slot < touched.size() && touched[slot] != b) ++slot;
    if (slot == touched.size()) {
      touched.push_back(b);
      sums.push_back(Eigen::VectorXd::Zero(bases_[b].cols()));
    }
    sums[slot] += bases_[b].row(position(v)).transpose();
  }
  double mass2 = 0.0;
  for (const auto& sum : sums) mass2 += sum.squaredNorm();
  return std::sqrt(mass2);
}

double BlockProjector::operator()(Vertex i, Vertex j) const {
  const std::size_t b = block_of(i);
  if (b != block_of(j)) return 0.0;
  return matrices_[b](position(i), position(j));
}

Projector BlockProjector::to_dense() const {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n_, n_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const VertexSet& block = blocks_[b];
    for (std::size_t c = 0; c < block.size(); ++c) {
      for (std::size_t r = 0; r < block.size(); ++r) {
        p(block[r], block[c]) =
            matrices_[b](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  return Projector(SymMatrix(p), rank_);
}

CandidateSet candidate_set(const BlockProjector& p_hat, Vertex j, std::int64_t s) {
  const Eigen::Index m = p_hat.dim();
  if (s < 1 || s > m) {
    throw Error(ErrorCode::kSizeOutOfRange,
                "candidate set size " + std::to_string(s) + " outside [1, " + std::to_string(m) + "]");
  }
  if (j < 0 || j >= m) {
    throw Error(ErrorCode::kSizeOutOfRange, "candidate pivot out of range");
  }
  const std::size_t b = p_hat.block_of(j);
  const VertexSet& block = p_hat.block(b);
  const auto column = p_hat.block_matrix(b).col(p_hat.position(j));

  // Entries of column j outside its block are exact zeros, so the ranking
  // is: positive block entries, then zeros by index, then negative ones.
  // Block entries are tracked by position in the block.
  std::vector<std::pair<double, std::size_t>> positive;
  std::vector<std::pair<double, std::size_t>> negative;
  const auto jr = static_cast<std::size_t>(p_hat.position(j));
  for (std::size_t r = 0; r < block.size(); ++r) {
    if (r == jr) continue;
    const double value = column(static_cast<Eigen::Index>(r));
    if (value > 0.0) positive.emplace_back(value, r);
    if (value < 0.0) negative.emplace_back(value, r);
  }
  const auto by_rank = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  auto need = static_cast<std::size_t>(s - 1);
  std::vector<char> picked(block.size(), 0);
  picked[jr] = 1;
  const auto take_from = [&](std::vector<std::pair<double, std::size_t>>& list) {
    const std::size_t take = std::min(need, list.size());
    // Only the chosen set matters, not its order, and by_rank is a strict
    // total order, so selection suffices.
    if (take < list.size()) {
      std::nth_element(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(take), list.end(),
                       by_rank);
    }
    for (std::size_t i = 0; i < take; ++i) picked[list[i].second] = 1;
    need -= take;
  };
  take_from(positive);
  VertexSet zeros;
  for (Vertex i = 0; i < m && need > 0; ++i) {
    if (i == j) continue;
    if (p_hat.block_of(i) != b || column(p_hat.position(i)) == 0.0) {
      zeros.push_back(i);
      --need;
    }
  }
  take_from(negative);
  check_invariant(need == 0, "candidate set ran out of indices");

  CandidateSet out;
  out.pivot = j;
  out.members.reserve(static_cast<std::size_t>(s));
  std::size_t z = 0;
  for (std::size_t r = 0; r < block.size(); ++r) {
    if (!picked[r]) continue;
    while (z < zeros.size() && zeros[z] < block[r]) out.members.push_back(zeros[z++]);
    out.members.push_back(block[r]);
  }
  out.members.insert(out.members.end(), zeros.begin() + static_cast<std::ptrdiff_t>(z), zeros.end());

  out.mass = p_hat.column_mass(out.members);
  return out;
}

std::vector<CandidateSet> candidate_sets(const BlockProjector& p_hat, std::int64_t s) {
  std::vector<CandidateSet> out;
  out.reserve(static_cast<std::size_t>(p_hat.dim()));
  for (Vertex j = 0; j < p_hat.dim(); ++j) out.push_back(candidate_set(p_hat, j, s));
  return out;
}

Vertex select_pivot(std::span<const CandidateSet> sets) {
  if (sets.empty()) throw Error(ErrorCode::kEmptySet, "select_pivot over no candidates");
  const CandidateSet* best = &sets.front();
  for (const CandidateSet& c : sets) {
    if (c.mass > best->mass || (c.mass == best->mass && c.pivot < best->pivot)) best = &c;
  }
  return best->pivot;
}

VertexSet extract_cluster(const Graph& g, std::span<const Vertex> w, std::int64_t s) {
  if (s < 1) throw Error(ErrorCode::kSizeOutOfRange, "cluster size must be positive");
  if (g.n() < s) {
    throw Error(ErrorCode::kGraphTooSmall,
                "graph has " + std::to_string(g.n()) + " vertices, need " + std::to_string(s));
  }
  const std::vector<std::uint64_t> mask = g.make_mask(w);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(g.n()));
  for (Vertex v = 0; v < g.n(); ++v) counts[static_cast<std::size_t>(v)] = g.neighbors_in(v, mask);
  std::vector<Vertex> order(static_cast<std::size_t>(g.n()));
  std::iota(order.begin(), order.end(), Vertex{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s), order.end(),
                    [&](Vertex a, Vertex b) {
                      const auto ca = counts[static_cast<std::size_t>(a)];
                      const auto cb = counts[static_cast<std::size_t>(b)];
                      if (ca != cb) return ca > cb;
                      return a < b;
                    });
  VertexSet out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s));
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Components stored back to back: component c is order[start[c], start[c+1]),
// each sorted ascending, listed by smallest vertex.
struct FlatComponents {
  std::vector<Vertex> order;
  std::vector<std::size_t> start;

  std::size_t size() const { return start.size() - 1; }
  std::span<const Vertex> operator[](std::size_t c) const {
    return std::span<const Vertex>(order).subspan(start[c], start[c + 1] - start[c]);
  }
};

FlatComponents flat_components(const Graph& g) {
  FlatComponents out;
  out.order.reserve(static_cast<std::size_t>(g.n()));
  out.start.push_back(0);
  std::vector<bool> seen(static_cast<std::size_t>(g.n()), false);
  std::vector<Vertex> stack;
  for (Vertex root = 0; root < g.n(); ++root) {
    if (seen[static_cast<std::size_t>(root)]) continue;
    const std::size_t first = out.order.size();
    seen[static_cast<std::size_t>(root)] = true;
    stack.push_back(root);
    while (!stack.empty()) {
      const Vertex u = stack.back();
      stack.pop_back();
      out.order.push_back(u);
      const auto row = g.row(u);
      for (std::size_t w = 0; w < row.size(); ++w) {
        std::uint64_t bits = row[w];
        while (bits != 0) {
          const auto bit = static_cast<std::size_t>(std::countr_zero(bits));
          bits &= bits - 1;
          const auto v = static_cast<Vertex>(w * 64 + bit);
          if (!seen[static_cast<std::size_t>(v)]) {
            seen[static_cast<std::size_t>(v)] = true;
            stack.push_back(v);
          }
        }
      }
    }
    std::sort(out.order.begin() + static_cast<std::ptrdiff_t>(first), out.order.end());
    out.start.push_back(out.order.size());
  }
  return out;
}

std::vector<VertexSet> unflatten(const FlatComponents& flat) {
  std::vector<VertexSet> out;
  out.reserve(flat.size());
  for (std::size_t c = 0; c < flat.size(); ++c) out.emplace_back(flat[c].begin(), flat[c].end());
  return out;
}

}  // namespace

std::vector<VertexSet> connected_components(const Graph& g) {
  return unflatten(flat_components(g));
}

namespace {

// Leading min(count, |comp|) eigenpairs of the subgraph induced on a
// connected component. An isolated vertex has the single eigenpair (0, [1]).
SpectralDecomposition component_spectrum(const Graph& g, std::span<const Vertex> comp,
                                         std::int64_t count) {
  const auto size = static_cast<Eigen::Index>(comp.size());
  if (size == 1) return {Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Ones(1, 1)};
  return top_eigenpairs(principal_submatrix(g, comp).to_matrix(),
                        std::min<Eigen::Index>(count, size));
}

// How many leading eigenpairs of each component belong to the l largest
// overall; ties go to the earlier component. Within a component the chosen
// pairs are always its leading ones since each list is descending.
std::vector<Eigen::Index> allocate_rank(std::span<const SpectralDecomposition* const> spectra,
                                        std::int64_t l) {
  struct Entry {
    double value;
    std::size_t order;  // position in the pool, which lists components in turn
    std::size_t component;
  };
  std::vector<Entry> pool;
  for (std::size_t c = 0; c < spectra.size(); ++c) {
    const Eigen::Index count = std::min<Eigen::Index>(l, spectra[c]->eigenvalues.size());
    for (Eigen::Index i = 0; i < count; ++i) {
      pool.push_back({spectra[c]->eigenvalues(i), pool.size(), c});
    }
  }
  check_invariant(static_cast<std::int64_t>(pool.size()) >= l, "too few eigenpairs pooled");
  const auto nth = pool.begin() + static_cast<std::ptrdiff_t>(l - 1);
  std::nth_element(pool.begin(), nth, pool.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.order < b.order;
  });
  std::vector<Eigen::Index> chosen(spectra.size(), 0);
  for (auto it = pool.begin(); it <= nth; ++it) ++chosen[it->component];
  return chosen;
}

BlockProjector assemble(Vertex n, std::vector<VertexSet> components,
                        std::span<const SpectralDecomposition* const> spectra,
                        std::span<const Eigen::Index> chosen) {
  std::vector<Eigen::MatrixXd> bases(components.size());
  for (std::size_t c = 0; c < components.size(); ++c) {
    bases[c] = spectra[c]->eigenvectors.leftCols(chosen[c]);
  }
  return BlockProjector(n, std::move(components), std::move(bases));
}

// Spectrum of one induced subgraph, with the best candidate set of the
// block on its own by number of chosen eigenpairs (ids are positions in the
// block; empty when some W_j of the block reaches outside it, since those
// sets depend on the rest of the graph).
struct BlockEntry {
  SpectralDecomposition spectrum;
  std::map<Eigen::Index, std::optional<CandidateSet>> best;
};

// Per-component state reused across recursion levels. Removing a cluster
// that is a union of components leaves the other components, and so their
// spectra, untouched. A component of a later level with the same smallest
// original id and the same size is the same vertex set, since components only
// shrink as vertices are removed, so that pair identifies it.
struct ComponentState {
  std::size_t size = 0;
  std::shared_ptr<BlockEntry> entry;
};
using ComponentCache = std::vector<ComponentState>;  // by smallest original id

// Components with identical induced adjacency (in block order) share one
// entry; the eigensolver is deterministic, so this only skips repeated work.
class BlockStore {
 public:
  std::shared_ptr<BlockEntry> get(const Graph& g, const VertexSet& comp, std::int64_t count) {
    const auto wanted = std::min<Eigen::Index>(count, static_cast<Eigen::Index>(comp.size()));
    if (comp.size() == 1) {
      if (!single_) {
        single_ = std::make_shared<BlockEntry>();
        single_->spectrum = {Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Ones(1, 1)};
      }
      return single_;
    }
    const Graph sub = principal_submatrix(g, comp);
    std::vector<std::uint64_t> key;
    key.reserve(comp.size() * sub.row(0).size() + 1);
    key.push_back(comp.size());
    for (Vertex v = 0; v < sub.n(); ++v) {
      const auto row = sub.row(v);
      key.insert(key.end(), row.begin(), row.end());
    }
    auto& slot = entries_[std::move(key)];
    if (!slot || slot->spectrum.eigenvalues.size() < wanted) {
      slot = std::make_shared<BlockEntry>();
      slot->spectrum = top_eigenpairs(sub.to_matrix(), wanted);
    }
    return slot;
  }

 private:
  std::shared_ptr<BlockEntry> single_;
  std::map<std::vector<std::uint64_t>, std::shared_ptr<BlockEntry>> entries_;
};

// The best W_j of a block on its own (ids are positions in the block), when
// every W_j of the block is j plus s-1 strictly positive entries of the
// block. Such sets do not depend on the rest of the graph.
std::optional<CandidateSet> block_best(const Eigen::MatrixXd& basis, std::int64_t s) {
  if (basis.rows() < s) return std::nullopt;
  const BlockProjector p_hat = BlockProjector::from_basis(basis);
  const Eigen::MatrixXd& mat = p_hat.block_matrix(0);
  std::optional<CandidateSet> best;
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    const Eigen::Index positives =
        (mat.col(r).array() > 0.0).count() - (mat(r, r) > 0.0 ? 1 : 0);
    if (positives < s - 1) return std::nullopt;
    CandidateSet c = candidate_set(p_hat, r, s);
    if (!best || c.mass > best->mass) best = std::move(c);
  }
  return best;
}

}  // namespace

BlockProjector graph_top_projector(const Graph& g, std::int64_t l, bool split_components) {
  if (l < 1 || l > g.n()) {
    throw Error(ErrorCode::kRankOutOfRange, "projector rank outside [1, n]");
  }
  if (!split_components) {
    return BlockProjector::from_basis(top_eigenpairs(g.to_matrix(), l).eigenvectors);
  }
  std::vector<VertexSet> components = connected_components(g);
  if (components.size() == 1) {
    return BlockProjector::from_basis(top_eigenpairs(g.to_matrix(), l).eigenvectors);
  }
  std::vector<SpectralDecomposition> parts;
  parts.reserve(components.size());
  for (const VertexSet& comp : components) parts.push_back(component_spectrum(g, comp, l));
  std::vector<const SpectralDecomposition*> spectra;
  for (const auto& part : parts) spectra.push_back(&part);
  const auto chosen = allocate_rank(spectra, l);
  return assemble(g.n(), std::move(components), spectra, chosen);
}

namespace {

// extract_cluster on the subgraph induced by `alive`, in the ids of `g`.
// Only vertices adjacent to w can have a positive count; the rest tie at
// zero and are taken by index.
VertexSet extract_cluster_alive(const Graph& g, std::span<const std::uint64_t> alive,
                                std::span<const Vertex> alive_list, std::span<const Vertex> w,
                                std::int64_t s) {
  const std::vector<std::uint64_t> in_w = g.make_mask(w);
  std::vector<std::uint64_t> touched(alive.size(), 0);
  for (const Vertex u : w) {
    const auto row = g.row(u);
    for (std::size_t i = 0; i < row.size(); ++i) touched[i] |= row[i] & alive[i];
  }
  std::vector<std::pair<std::int64_t, Vertex>> ranked;
  for (std::size_t i = 0; i < touched.size(); ++i) {
    std::uint64_t bits = touched[i];
    while (bits != 0) {
      const auto v = static_cast<Vertex>(i * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
      ranked.emplace_back(g.neighbors_in(v, in_w), v);
    }
  }
  const auto take = std::min(ranked.size(), static_cast<std::size_t>(s));
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(take),
                    ranked.end(), [](const auto& x, const auto& y) {
                      if (x.first != y.first) return x.first > y.first;
                      return x.second < y.second;
                    });
  VertexSet out;
  out.reserve(static_cast<std::size_t>(s));
  for (std::size_t i = 0; i < take; ++i) out.push_back(ranked[i].second);
  for (std::size_t i = 0; out.size() < static_cast<std::size_t>(s); ++i) {
    const Vertex v = alive_list[i];
    if (!((touched[static_cast<std::size_t>(v) >> 6] >> (static_cast<std::size_t>(v) & 63)) & 1ULL)) {
      out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Connected pieces of `vertices` in the subgraph of g they induce, each
// ascending.
std::vector<VertexSet> split_component(const Graph& g, const VertexSet& vertices) {
  std::vector<std::uint64_t> left = g.make_mask(vertices);
  std::vector<VertexSet> out;
  std::vector<Vertex> stack;
  for (const Vertex root : vertices) {
    auto& word = left[static_cast<std::size_t>(root) >> 6];
    const std::uint64_t bit = 1ULL << (static_cast<std::size_t>(root) & 63);
    if (!(word & bit)) continue;
    word &= ~bit;
    VertexSet piece;
    stack.push_back(root);
    while (!stack.empty()) {
      const Vertex u = stack.back();
      stack.pop_back();
      piece.push_back(u);
      const auto row = g.row(u);
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::uint64_t bits = row[i] & left[i];
        left[i] &= ~bits;
        while (bits != 0) {
          stack.push_back(static_cast<Vertex>(i * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
          bits &= bits - 1;
        }
      }
    }
    std::sort(piece.begin(), piece.end());
    out.push_back(std::move(piece));
  }
  return out;
}

}  // namespace

RecoveryResult identify_clusters(const Graph& g, std::int64_t s, const RecoveryOptions& options) {
  if (s < 1) throw Error(ErrorCode::kZeroSize, "cluster size must be positive");

  RecoveryResult result;
  result.s = s;
  VertexSet current(static_cast<std::size_t>(g.n()));
  std::iota(current.begin(), current.end(), Vertex{0});
  std::vector<std::uint64_t> alive = g.make_mask(current);
  // Components of the current graph in original ids, ordered by smallest
  // vertex. Maintained across levels: removing a cluster only splits the
  // components it touches.
  std::vector<VertexSet> components;
  if (options.split_components && g.n() > 0) components = connected_components(g);
  ComponentCache cache(static_cast<std::size_t>(g.n()));
  BlockStore store;

  for (std::int64_t level = 0;; ++level) {
    const auto m = static_cast<std::int64_t>(current.size());
    const std::int64_t k = m / s;
    if (k < 1) break;

    const auto to_original = [&](Vertex v) { return current[static_cast<std::size_t>(v)]; };
    const auto to_local = [&](Vertex v) {
      return static_cast<Vertex>(std::lower_bound(current.begin(), current.end(), v) -
                                 current.begin());
    };

    VertexSet cluster;  // original ids
    RecoveryLevel record;
    record.k = k;
    if (m == s && options.skip_forced_level && !options.observer) {
      cluster = current;
      record.pivot = current.front();
      record.pivot_mass = std::numeric_limits<double>::quiet_NaN();
      record.candidate = current;
    } else {
      std::optional<CandidateSet> best;  // original ids
      std::vector<const SpectralDecomposition*> spectra;
      std::vector<Eigen::Index> chosen;
      if (components.size() > 1) {
        std::vector<ComponentState*> states;
        spectra.reserve(components.size());
        states.reserve(components.size());
        for (const VertexSet& comp : components) {
          ComponentState& state = cache[static_cast<std::size_t>(comp.front())];
          const Eigen::Index wanted = std::min<Eigen::Index>(k, static_cast<Eigen::Index>(comp.size()));
          if (state.size != comp.size() || state.entry->spectrum.eigenvalues.size() < wanted) {
            state = ComponentState{comp.size(), store.get(g, comp, k)};
          }
          spectra.push_back(&state.entry->spectrum);
          states.push_back(&state);
        }
        chosen = allocate_rank(spectra, k);

        if (!options.observer) {
          // Best over blocks, ties to the smaller pivot; any block whose
          // sets reach outside it forces the full candidate scan.
          bool pure = true;
          const CandidateSet* top = nullptr;
          std::size_t top_block = 0;
          for (std::size_t c = 0; c < components.size() && pure; ++c) {
            auto& memo = states[c]->entry->best;
            auto it = memo.find(chosen[c]);
            if (it == memo.end()) {
              it = memo.emplace(chosen[c], block_best(spectra[c]->eigenvectors.leftCols(chosen[c]), s))
                       .first;
            }
            if (!it->second) {
              pure = false;
              continue;
            }
            const auto pivot = [&](std::size_t block, const CandidateSet& set) {
              return components[block][static_cast<std::size_t>(set.pivot)];
            };
            if (top == nullptr || it->second->mass > top->mass ||
                (it->second->mass == top->mass && pivot(c, *it->second) < pivot(top_block, *top))) {
              top = &*it->second;
              top_block = c;
            }
          }
          if (pure) {
            const VertexSet& comp = components[top_block];
            best = *top;
            best->pivot = comp[static_cast<std::size_t>(best->pivot)];
            for (Vertex& v : best->members) v = comp[static_cast<std::size_t>(v)];
          }
        }
      }

      if (best) {
        cluster = extract_cluster_alive(g, alive, current, best->members, s);
      } else {
        // Full scan in local ids of the current graph.
        const Graph graph = principal_submatrix(g, current);
        std::optional<BlockProjector> p_hat;
        if (components.size() > 1) {
          std::vector<VertexSet> local(components.size());
          for (std::size_t c = 0; c < components.size(); ++c) {
            local[c].reserve(components[c].size());
            for (const Vertex v : components[c]) local[c].push_back(to_local(v));
          }
          p_hat = assemble(graph.n(), std::move(local), spectra, chosen);
        } else {
          p_hat = graph_top_projector(graph, k, false);
        }
        const std::vector<CandidateSet> candidates = candidate_sets(*p_hat, s);
        best = candidates[static_cast<std::size_t>(select_pivot(candidates))];
        const VertexSet cluster_local = extract_cluster(graph, best->members, s);
        if (options.observer) {
          options.observer(LevelView{level, k, current, &graph, &*p_hat, candidates, best->pivot,
                                     &cluster_local});
        }
        best->pivot = to_original(best->pivot);
        for (Vertex& v : best->members) v = to_original(v);
        cluster.reserve(cluster_local.size());
        for (const Vertex v : cluster_local) cluster.push_back(to_original(v));
      }
      record.pivot = best->pivot;
      record.pivot_mass = best->mass;
      record.candidate = std::move(best->members);
    }

    for (const Vertex v : cluster) {
      alive[static_cast<std::size_t>(v) >> 6] &= ~(1ULL << (static_cast<std::size_t>(v) & 63));
    }
    VertexSet remaining;
    remaining.reserve(current.size() - cluster.size());
    std::set_difference(current.begin(), current.end(), cluster.begin(), cluster.end(),
                        std::back_inserter(remaining));
    if (!components.empty()) {
      std::vector<VertexSet> kept;
      std::vector<VertexSet> pieces;
      kept.reserve(components.size());
      for (VertexSet& comp : components) {
        const bool hit = std::any_of(comp.begin(), comp.end(), [&](Vertex v) {
          return !((alive[static_cast<std::size_t>(v) >> 6] >> (static_cast<std::size_t>(v) & 63)) & 1ULL);
        });
        if (!hit) {
          kept.push_back(std::move(comp));
          continue;
        }
        VertexSet rest;
        for (const Vertex v : comp) {
          if ((alive[static_cast<std::size_t>(v) >> 6] >> (static_cast<std::size_t>(v) & 63)) & 1ULL) {
            rest.push_back(v);
          }
        }
        if (rest.empty()) continue;
        for (VertexSet& piece : split_component(g, rest)) pieces.push_back(std::move(piece));
      }
      const auto by_front = [](const VertexSet& x, const VertexSet& y) {
        return x.front() < y.front();
      };
      std::sort(pieces.begin(), pieces.end(), by_front);
      components.clear();
      std::merge(std::make_move_iterator(kept.begin()), std::make_move_iterator(kept.end()),
                 std::make_move_iterator(pieces.begin()), std::make_move_iterator(pieces.end()),
                 std::back_inserter(components), by_front);
    }

    result.clusters.push_back(std::move(cluster));
    if (options.record_levels) result.levels.push_back(std::move(record));
    current = std::move(remaining);
    if (current.empty()) break;
  }
  result.leftover = std::move(current);

  std::vector<bool> covered(static_cast<std::size_t>(g.n()), false);
  std::size_t total = result.leftover.size();
  for (const Vertex v : result.leftover) covered[static_cast<std::size_t>(v)] = true;
  for (const VertexSet& c : result.clusters) {
    check_invariant(static_cast<std::int64_t>(c.size()) == s, "recovered cluster has wrong size");
    for (const Vertex v : c) {
      check_invariant(!covered[static_cast<std::size_t>(v)], "recovered clusters overlap");
      covered[static_cast<std::size_t>(v)] = true;
    }
    total += c.size();
  }
  check_invariant(total == static_cast<std::size_t>(g.n()), "recovery lost vertices");
  return result;
}

bool same_partition(const RecoveryResult& result, const PlantedPartition& truth) {
  if (!result.leftover.empty()) return false;
  if (static_cast<std::int64_t>(result.clusters.size()) != truth.k()) return false;
  std::set<VertexSet> expected;
  for (std::int64_t i = 0; i < truth.k(); ++i) expected.insert(truth.members(i));
  std::set<VertexSet> got;
  for (const VertexSet& c : result.clusters) {
    VertexSet sorted = c;
    std::sort(sorted.begin(), sorted.end());
    got.insert(std::move(sorted));
  }
  return got == expected;
}

}  // namespace planted
