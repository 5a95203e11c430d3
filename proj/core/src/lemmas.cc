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

#include "planted/lemmas.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "planted/error.h"
#include "planted/random.h"

namespace planted {
namespace {

constexpr double kNormTolerance = 1e-8;

void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(op) + ": " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

void require_epsilon(double epsilon, double upper) {
  if (!(epsilon > 0.0 && epsilon <= upper)) {
    throw Error(ErrorCode::kEpsilonOutOfRange,
                "epsilon " + std::to_string(epsilon) + " outside (0, " + std::to_string(upper) + "]");
  }
}

}  // namespace

double admissible_c(double p, double q) {
  if (p == q) throw Error(ErrorCode::kDegenerateGap, "p == q leaves no gap to exploit");
  ModelParams{p, q, 0}.validate();
  const double gap = p - q;
  return std::max(88.0 / gap, 72.0 / (gap * gap));
}

double noise_sigma(double p, double q) {
  return std::max(std::sqrt(p * (1.0 - p)), std::sqrt(q * (1.0 - q)));
}

Constants Constants::from_c(double p, double q, double c) {
  if (p == q) throw Error(ErrorCode::kDegenerateGap, "p == q leaves no gap to exploit");
  ModelParams{p, q, 0}.validate();
  Constants out;
  out.p = p;
  out.q = q;
  out.c = c;
  out.c_prime = (p - q) * c;
  if (!(out.c_prime > 16.0)) {
    throw Error(ErrorCode::kInvalidParams,
                "c' = (p - q) c = " + std::to_string(out.c_prime) + " must exceed 16");
  }
  out.epsilon = 8.0 / (out.c_prime - 8.0);
  out.sigma = noise_sigma(p, q);
  out.K = 1.0;
  return out;
}

Constants Constants::admissible(double p, double q) {
  return from_c(p, q, admissible_c(p, q));
}

std::vector<double> theoretical_spectrum(std::int64_t l, std::int64_t s, double p, double q) {
  if (l < 1 || s < 1) throw Error(ErrorCode::kZeroSize, "theoretical_spectrum needs l, s >= 1");
  const std::int64_t m = l * s;
  const double gap = (p - q) * static_cast<double>(s);
  std::vector<double> out(static_cast<std::size_t>(m), 0.0);
  out[0] = gap + q * static_cast<double>(m);
  for (std::int64_t i = 1; i < l; ++i) out[static_cast<std::size_t>(i)] = gap;
  return out;
}

ClusterMask::ClusterMask(std::int64_t k)
    : k_(k), words_((static_cast<std::size_t>(k) + 63) / 64, 0) {}

ClusterMask ClusterMask::all(std::int64_t k) {
  ClusterMask out(k);
  for (std::int64_t i = 0; i < k; ++i) out.set(i);
  return out;
}

ClusterMask ClusterMask::of(std::int64_t k, std::span<const std::int64_t> clusters) {
  ClusterMask out(k);
  for (const std::int64_t c : clusters) out.set(c);
  return out;
}

bool ClusterMask::test(std::int64_t i) const {
  return (words_[static_cast<std::size_t>(i) >> 6] >> (static_cast<std::size_t>(i) & 63)) & 1ULL;
}

void ClusterMask::set(std::int64_t i) {
  if (i < 0 || i >= k_) throw Error(ErrorCode::kSizeOutOfRange, "cluster index out of range");
  words_[static_cast<std::size_t>(i) >> 6] |= 1ULL << (static_cast<std::size_t>(i) & 63);
}

void ClusterMask::reset(std::int64_t i) {
  if (i < 0 || i >= k_) throw Error(ErrorCode::kSizeOutOfRange, "cluster index out of range");
  words_[static_cast<std::size_t>(i) >> 6] &= ~(1ULL << (static_cast<std::size_t>(i) & 63));
}

std::int64_t ClusterMask::count() const {
  std::int64_t c = 0;
  for (const std::uint64_t w : words_) c += std::popcount(w);
  return c;
}

std::vector<std::int64_t> ClusterMask::clusters() const {
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < k_; ++i) {
    if (test(i)) out.push_back(i);
  }
  return out;
}

std::string ClusterMask::to_hex() const {
  std::string out;
  bool leading = true;
  for (auto it = words_.rbegin(); it != words_.rend(); ++it) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), leading ? "%llx" : "%016llx",
                  static_cast<unsigned long long>(*it));
    if (leading && *it == 0) continue;
    out += buf;
    leading = false;
  }
  return out.empty() ? "0" : out;
}

BoundReport make_report(std::string name, double lhs, double rhs, Relation relation,
                        double tolerance, BoundContext context) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.relation = relation;
  r.tolerance = tolerance;
  r.satisfied = relation == Relation::kAtMost ? lhs <= rhs + tolerance : lhs >= rhs - tolerance;
  r.context = std::move(context);
  return r;
}

BoundReport check_norm_deviation(const SymMatrix& g_hat_j, const SymMatrix& g_j,
                                 BoundContext context) {
  require_same_dim(g_hat_j, g_j, "check_norm_deviation");
  const double m = static_cast<double>(g_j.dim());
  return make_report("norm_deviation", spectral_norm(g_hat_j - g_j), 8.0 * std::sqrt(m),
                     Relation::kAtMost, 0.0, std::move(context));
}

BoundReport check_weyl(const SymMatrix& g_hat_j, const SymMatrix& g_j, BoundContext context) {
  require_same_dim(g_hat_j, g_j, "check_weyl");
  const Eigen::VectorXd a = eigenvalues_descending(g_hat_j);
  const Eigen::VectorXd b = eigenvalues_descending(g_j);
  const double gap = a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
  return make_report("weyl", gap, spectral_norm(g_hat_j - g_j), Relation::kAtMost,
                     kNormTolerance, std::move(context));
}

BoundReport check_row_sum_bound(const SymMatrix& a, BoundContext context) {
  const Eigen::VectorXd values = eigenvalues_descending(a);
  const double top = values.size() == 0 ? 0.0 : values(0);
  const double row_sum =
      a.dim() == 0 ? 0.0 : a.dense().cwiseAbs().rowwise().sum().maxCoeff();
  return make_report("row_sum", top, row_sum, Relation::kAtMost, kNormTolerance,
                     std::move(context));
}

SeparationReports check_separation(const SymMatrix& g_hat_j, const SymMatrix& g_j,
                                   std::int64_t l, double c_prime, BoundContext context) {
  require_same_dim(g_hat_j, g_j, "check_separation");
  const Eigen::Index m = g_hat_j.dim();
  if (l < 1 || l > m) throw Error(ErrorCode::kRankOutOfRange, "separation rank outside [1, m]");
  const Eigen::VectorXd values = eigenvalues_descending(g_hat_j);
  const double root_m = std::sqrt(static_cast<double>(m));

  SeparationReports out;
  out.top_lower = make_report("separation_top_lower", values(l - 1),
                              (c_prime - 8.0) * root_m, Relation::kAtLeast, 0.0, context);
  out.top_upper = make_report("separation_top_upper", values(0), static_cast<double>(m),
                              Relation::kAtMost, 0.0, context);
  const double next = l < m ? std::abs(values(l)) : 0.0;
  out.rest = make_report("separation_rest", next, 8.0 * root_m, Relation::kAtMost, 0.0, context);
  out.norm_premise_held = spectral_norm(g_hat_j - g_j) <= 8.0 * root_m;
  return out;
}

BoundReport check_projector_rank_inequality(const Projector& a, const Projector& b,
                                            BoundContext context) {
  if (a.dim() != b.dim() || a.rank() != b.rank()) {
    throw Error(ErrorCode::kDimensionMismatch, "projectors differ in dimension or rank");
  }
  const SymMatrix diff = a.matrix() - b.matrix();
  const double spectral = spectral_norm(diff);
  const double frob = frobenius_norm(diff);
  const double rhs = 2.0 * static_cast<double>(a.rank()) * spectral * spectral;
  return make_report("projector_frobenius_rank", frob * frob, rhs, Relation::kAtMost,
                     kNormTolerance * std::max(1.0, rhs), std::move(context));
}

ProjectorDeviationReports check_projector_deviation(const SymMatrix& g_hat_j,
                                                    const SymMatrix& g_j, std::int64_t l,
                                                    BoundContext context) {
  require_same_dim(g_hat_j, g_j, "check_projector_deviation");
  const Projector p_hat = top_projector(g_hat_j, l);
  const Projector p = top_projector(g_j, l);
  const SymMatrix diff = p_hat.matrix() - p.matrix();

  ProjectorDeviationReports out;
  out.spectral = spectral_norm(diff);
  out.frobenius = frobenius_norm(diff);

  const double deviation = spectral_norm(g_hat_j - g_j);
  const double lambda_l = eigenvalues_descending(g_j)(l - 1);
  const double denom = lambda_l - 2.0 * deviation;
  const double bound = denom > 0.0 ? deviation / denom : std::numeric_limits<double>::infinity();
  out.spectral_instance = make_report("projector_deviation", out.spectral, bound,
                                      Relation::kAtMost, kNormTolerance, context);
  out.spectral_trivial = make_report("projector_deviation_trivial", out.spectral, 2.0,
                                     Relation::kAtMost, kNormTolerance, context);
  out.frobenius_rank = check_projector_rank_inequality(p_hat, p, context);
  return out;
}

BoundReport check_projector_deviation_theorem(double deviation, const Constants& constants,
                                              BoundContext context) {
  return make_report("projector_deviation_theorem", deviation, constants.epsilon,
                     Relation::kAtMost, 0.0, std::move(context));
}

double empirical_epsilon(const Projector& p_hat, const SymMatrix& h_j, std::int64_t s) {
  if (p_hat.dim() != h_j.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "empirical_epsilon dimensions");
  }
  if (s < 1) throw Error(ErrorCode::kZeroSize, "cluster size must be positive");
  return spectral_norm(p_hat.matrix() - h_j * (1.0 / static_cast<double>(s)));
}

BoundReport check_good_column(std::span<const CandidateSet> candidates, std::int64_t s,
                              double epsilon, BoundContext context) {
  require_epsilon(epsilon, 0.1);
  if (candidates.empty()) throw Error(ErrorCode::kEmptySet, "no candidate sets");
  double best = 0.0;
  for (const CandidateSet& c : candidates) best = std::max(best, c.mass);
  const double rhs =
      (1.0 - 8.0 * epsilon * epsilon - epsilon) * std::sqrt(static_cast<double>(s));
  return make_report("good_column", best, rhs, Relation::kAtLeast, 0.0, std::move(context));
}

BoundReport check_good_column(const Projector& p_hat, std::int64_t s, double epsilon,
                              BoundContext context) {
  require_epsilon(epsilon, 0.1);
  const std::vector<CandidateSet> candidates = candidate_sets(p_hat, s);
  return check_good_column(candidates, s, epsilon, std::move(context));
}

BoundReport check_purity(std::span<const Vertex> w, const PlantedPartition& part,
                         double epsilon, BoundContext context) {
  if (static_cast<std::int64_t>(w.size()) != part.s()) {
    throw Error(ErrorCode::kSizeOutOfRange, "purity check needs |w| = s");
  }
  std::vector<std::int64_t> overlap(static_cast<std::size_t>(part.k()), 0);
  for (const Vertex v : w) ++overlap[static_cast<std::size_t>(part.cluster_of(v))];
  const auto best = *std::max_element(overlap.begin(), overlap.end());
  const double s = static_cast<double>(part.s());
  return make_report("purity", static_cast<double>(best), (1.0 - 3.0 * epsilon) * s,
                     Relation::kAtLeast, 1e-9 * s, std::move(context));
}

ConcentrationReport check_concentration(const Graph& g, const PlantedPartition& part,
                                        const ModelParams& params, double epsilon,
                                        BoundContext context, std::size_t max_records) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kEpsilonOutOfRange, "concentration needs epsilon > 0");
  }
  if (g.n() != part.n()) throw Error(ErrorCode::kDimensionMismatch, "graph and partition sizes");
  const double s = static_cast<double>(part.s());
  const double in_threshold = (params.p - epsilon) * s;
  const double out_threshold = (params.q + epsilon) * s;

  ConcentrationReport out;
  double min_in = std::numeric_limits<double>::infinity();
  double max_out = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < part.k(); ++i) {
    const std::vector<std::uint64_t> mask = g.make_mask(part.members(i));
    BoundContext cluster_context = context;
    cluster_context.subset = ClusterMask::of(part.k(), std::span(&i, 1)).to_hex();
    for (Vertex j = 0; j < g.n(); ++j) {
      const auto count = static_cast<double>(g.neighbors_in(j, mask));
      const bool inside = part.cluster_of(j) == i;
      const bool bad = inside ? count < in_threshold : count > out_threshold;
      if (inside) {
        min_in = std::min(min_in, count);
      } else {
        max_out = std::max(max_out, count);
      }
      if (!bad) continue;
      ++out.violation_count;
      if (out.violations.size() < max_records) {
        out.violations.push_back(make_report(
            (inside ? "concentration_in:v" : "concentration_out:v") + std::to_string(j), count,
            inside ? in_threshold : out_threshold,
            inside ? Relation::kAtLeast : Relation::kAtMost, 0.0, cluster_context));
      } else {
        out.overflow = true;
      }
    }
  }
  if (part.k() == 1) max_out = 0.0;
  out.in_cluster = make_report("concentration_in", min_in, in_threshold, Relation::kAtLeast, 0.0,
                               context);
  out.out_cluster = make_report("concentration_out", max_out, out_threshold, Relation::kAtMost,
                                0.0, context);
  out.separation = make_report("concentration_separation", params.p - 4.0 * epsilon,
                               params.q + 4.0 * epsilon, Relation::kAtLeast, 0.0, context);
  return out;
}

std::vector<ClusterMask> cluster_union_family(std::int64_t k, std::uint64_t seed,
                                              std::int64_t enumerate_limit,
                                              std::size_t sample_size) {
  if (k < 1) throw Error(ErrorCode::kEmptyFamily, "no clusters");
  std::vector<ClusterMask> out;
  if (k <= enumerate_limit && k < 63) {
    const std::uint64_t total = (1ULL << k) - 1;
    out.reserve(total);
    for (std::uint64_t bits = 1; bits <= total; ++bits) {
      ClusterMask mask(k);
      for (std::int64_t i = 0; i < k; ++i) {
        if ((bits >> i) & 1ULL) mask.set(i);
      }
      out.push_back(std::move(mask));
    }
  } else {
    std::set<ClusterMask> picked;
    SplitMix64 rng(seed);
    if (k < 63) sample_size = std::min<std::size_t>(sample_size, (1ULL << k) - 1);
    while (picked.size() < sample_size) {
      ClusterMask mask(k);
      for (std::int64_t i = 0; i < k; ++i) {
        if (rng() & 1ULL) mask.set(i);
      }
      if (!mask.empty()) picked.insert(std::move(mask));
    }
    out.assign(picked.begin(), picked.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

SymMatrix noise_matrix(const Graph& g, const PlantedPartition& part, const ModelParams& params) {
  SymMatrix expected = expectation_matrix(part, params);
  expected -= SymMatrix::identity(part.n()) * params.p;
  return g.to_matrix() - expected;
}

std::vector<BoundReport> check_fk_submatrices(const SymMatrix& x, const PlantedPartition& part,
                                              std::span<const ClusterMask> family,
                                              double sigma, double K, BoundContext context) {
  if (family.empty()) throw Error(ErrorCode::kEmptyFamily, "empty family of vertex sets");
  if (x.dim() != part.n()) throw Error(ErrorCode::kDimensionMismatch, "noise matrix size");
  std::vector<BoundReport> out;
  out.reserve(family.size());
  for (const ClusterMask& mask : family) {
    const VertexSet vertices = part.union_of(mask.clusters());
    const double size = static_cast<double>(vertices.size());
    BoundContext ctx = context;
    ctx.subset = mask.to_hex();
    out.push_back(make_report("fk_submatrix", spectral_norm(principal_submatrix(x, vertices)),
                              2.0 * (sigma + 3.0 * K) * std::sqrt(size), Relation::kAtMost, 0.0,
                              std::move(ctx)));
  }
  return out;
}

}  // namespace planted
