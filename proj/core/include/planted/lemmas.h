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

#ifndef PLANTED_LEMMAS_H_
#define PLANTED_LEMMAS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "planted/graphgen.h"
#include "planted/recovery.h"
#include "planted/spectral.h"
#include "planted/types.h"

namespace planted {

// max{88 / (p - q), 72 / (p - q)^2}: the cluster-size constant c for which
// s >= c sqrt(n) guarantees recovery. Throws kDegenerateGap when p == q and
// kInvalidParams outside 0 <= q < p <= 1.
double admissible_c(double p, double q);

// max(sqrt(p(1-p)), sqrt(q(1-q))), the entrywise standard deviation bound
// of the noise matrix Ĝ - E[Ĝ].
double noise_sigma(double p, double q);

// Derived constants for a cluster-size constant c:
//   c' = (p - q) c, epsilon = 8 / (c' - 8).
// epsilon is only defined once c' > 16, where the top eigenvalues separate.
struct Constants {
  double p = 0.0;
  double q = 0.0;
  double c = 0.0;
  double c_prime = 0.0;
  double epsilon = 0.0;
  double sigma = 0.0;
  double K = 1.0;

  // Throws kInvalidParams when c' <= 16 or the probabilities are invalid.
  static Constants from_c(double p, double q, double c);
  // from_c(p, q, admissible_c(p, q)).
  static Constants admissible(double p, double q);
};

// Eigenvalues of G_J for |J| = l clusters of size s, descending:
// (p - q)s + q l s, then (p - q)s repeated l - 1 times, then l s - l zeros.
std::vector<double> theoretical_spectrum(std::int64_t l, std::int64_t s, double p, double q);

// Set of cluster indices, printed as a hexadecimal bitmask (bit i is
// cluster i).
class ClusterMask {
 public:
  ClusterMask() = default;
  explicit ClusterMask(std::int64_t k);
  static ClusterMask all(std::int64_t k);
  static ClusterMask of(std::int64_t k, std::span<const std::int64_t> clusters);

  std::int64_t k() const noexcept { return k_; }
  bool test(std::int64_t i) const;
  void set(std::int64_t i);
  void reset(std::int64_t i);
  std::int64_t count() const;
  bool empty() const { return count() == 0; }
  std::vector<std::int64_t> clusters() const;
  std::string to_hex() const;

  friend bool operator==(const ClusterMask&, const ClusterMask&) = default;
  friend auto operator<=>(const ClusterMask& a, const ClusterMask& b) {
    return a.words_ <=> b.words_;
  }

 private:
  std::int64_t k_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class Relation {
  kAtMost,   // satisfied iff lhs <= rhs + tolerance
  kAtLeast,  // satisfied iff lhs >= rhs - tolerance
};

struct BoundContext {
  std::int64_t n = 0;
  std::int64_t k = 0;
  std::int64_t s = 0;
  double p = 0.0;
  double q = 0.0;
  std::optional<std::uint64_t> seed;
  std::string subset;  // hex cluster mask of J (or S); empty when not applicable
};

struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  Relation relation = Relation::kAtMost;
  double tolerance = 0.0;
  bool satisfied = false;
  BoundContext context;
};

BoundReport make_report(std::string name, double lhs, double rhs, Relation relation,
                        double tolerance, BoundContext context);

// ||Ĝ_J - G_J||_2 <= 8 sqrt(m), m the dimension. Throws kDimensionMismatch.
BoundReport check_norm_deviation(const SymMatrix& g_hat_j, const SymMatrix& g_j,
                                 BoundContext context = {});

// Weyl: max_i |lambda_i(Ĝ_J) - lambda_i(G_J)| <= ||Ĝ_J - G_J||_2, up to 1e-8.
BoundReport check_weyl(const SymMatrix& g_hat_j, const SymMatrix& g_j,
                       BoundContext context = {});

// lambda_1(A) <= max_i sum_j |A_ij|, up to 1e-8.
BoundReport check_row_sum_bound(const SymMatrix& a, BoundContext context = {});

struct SeparationReports {
  BoundReport top_lower;  // lambda_l(Ĝ_J) >= (c' - 8) sqrt(m)
  BoundReport top_upper;  // lambda_1(Ĝ_J) <= m
  BoundReport rest;       // |lambda_{l+1}(Ĝ_J)| <= 8 sqrt(m)
  bool norm_premise_held = false;  // whether ||Ĝ_J - G_J||_2 <= 8 sqrt(m)
};

// Eigenvalue separation of Ĝ_J for a given c' = (p - q) c. c' is taken
// directly rather than through Constants because desk-scale instances are
// checked with c' <= 16, where epsilon is undefined. `g_j` is used only to
// record whether the norm premise held on this instance.
SeparationReports check_separation(const SymMatrix& g_hat_j, const SymMatrix& g_j,
                                   std::int64_t l, double c_prime, BoundContext context = {});

struct ProjectorDeviationReports {
  double spectral = 0.0;   // ||P̂ - P||_2
  double frobenius = 0.0;  // ||P̂ - P||_F
  // ||P̂ - P||_2 <= d / (lambda_l(G_J) - 2 d) with d = ||Ĝ_J - G_J||_2 the
  // measured deviation; +inf when the denominator is not positive.
  BoundReport spectral_instance;
  BoundReport spectral_trivial;  // ||P̂ - P||_2 <= 2
  BoundReport frobenius_rank;    // ||P̂ - P||_F^2 <= 2 l ||P̂ - P||_2^2
};

// P̂ = P_l(Ĝ_J) against P = P_l(G_J). Throws kDimensionMismatch.
ProjectorDeviationReports check_projector_deviation(const SymMatrix& g_hat_j,
                                                    const SymMatrix& g_j, std::int64_t l,
                                                    BoundContext context = {});

// ||A - B||_F^2 <= 2 l ||A - B||_2^2 for two rank-l projectors.
BoundReport check_projector_rank_inequality(const Projector& a, const Projector& b,
                                            BoundContext context = {});

// ||P̂ - P||_2 <= epsilon with the theorem's epsilon = 8 / (c' - 8).
BoundReport check_projector_deviation_theorem(double deviation, const Constants& constants,
                                              BoundContext context = {});

// ||P̂ - H_J / s||_2: the deviation of a projector from the true one,
// used as the measured epsilon.
double empirical_epsilon(const Projector& p_hat, const SymMatrix& h_j, std::int64_t s);

// max_j ||P̂ 1_{W_j}||_2 >= (1 - 8 eps^2 - eps) sqrt(s). Throws
// kEpsilonOutOfRange unless 0 < epsilon <= 0.1.
BoundReport check_good_column(const Projector& p_hat, std::int64_t s, double epsilon,
                              BoundContext context = {});
// Same, reusing already-built candidate sets.
BoundReport check_good_column(std::span<const CandidateSet> candidates, std::int64_t s,
                              double epsilon, BoundContext context = {});

// max_i |w ∩ C_i| >= (1 - 3 eps) s. Throws kSizeOutOfRange unless |w| = s.
BoundReport check_purity(std::span<const Vertex> w, const PlantedPartition& part,
                         double epsilon, BoundContext context = {});

struct ConcentrationReport {
  // One entry per violating (cluster, vertex) pair, capped.
  std::vector<BoundReport> violations;
  std::int64_t violation_count = 0;
  bool overflow = false;
  BoundReport in_cluster;   // min_{i, j in C_i} |N(j) ∩ C_i| >= (p - eps) s
  BoundReport out_cluster;  // max_{i, j not in C_i} |N(j) ∩ C_i| <= (q + eps) s
  BoundReport separation;   // p - 4 eps >= q + 4 eps

  bool satisfied() const { return violation_count == 0; }
};

inline constexpr std::size_t kMaxViolationRecords = 1'000'000;

// Neighbour-count concentration. Throws kEpsilonOutOfRange unless eps > 0.
ConcentrationReport check_concentration(const Graph& g, const PlantedPartition& part,
                                        const ModelParams& params, double epsilon,
                                        BoundContext context = {},
                                        std::size_t max_records = kMaxViolationRecords);

// Nonempty unions of clusters: all 2^k - 1 of them when k <= enumerate_limit,
// otherwise `sample_size` distinct ones (at most 2^k - 1) drawn uniformly with `seed`.
// Returned sorted.
std::vector<ClusterMask> cluster_union_family(std::int64_t k, std::uint64_t seed,
                                              std::int64_t enumerate_limit = 12,
                                              std::size_t sample_size = 4096);

// X = Ĝ - E[Ĝ], with E[Ĝ] = G - pI.
SymMatrix noise_matrix(const Graph& g, const PlantedPartition& part, const ModelParams& params);

// ||X[S]||_2 <= 2 (sigma + 3 K) sqrt(|S|) for every S in the family.
// Throws kEmptyFamily.
std::vector<BoundReport> check_fk_submatrices(const SymMatrix& x, const PlantedPartition& part,
                                              std::span<const ClusterMask> family,
                                              double sigma, double K,
                                              BoundContext context = {});

}  // namespace planted

#endif  // PLANTED_LEMMAS_H_
