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
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <tuple>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "planted/error.h"
#include "planted/graphgen.h"
#include "planted/harness.h"
#include "planted/recovery.h"

namespace planted {
namespace {

using ::testing::ElementsAre;

// P(Bin(trials, prob) = x) for every x.
std::vector<double> binomial_pmf(int trials, double prob) {
  std::vector<double> pmf(static_cast<std::size_t>(trials) + 1);
  for (int x = 0; x <= trials; ++x) {
    const double log_choose =
        std::lgamma(trials + 1.0) - std::lgamma(x + 1.0) - std::lgamma(trials - x + 1.0);
    pmf[static_cast<std::size_t>(x)] =
        std::exp(log_choose + x * std::log(prob) + (trials - x) * std::log1p(-prob));
  }
  return pmf;
}

TEST(ConstantsTest, AdmissibleC) {
  // 88 / 0.4 = 220 and 72 / 0.16 = 450.
  EXPECT_NEAR(admissible_c(0.7, 0.3), 450.0, 1e-9);
  EXPECT_DOUBLE_EQ(admissible_c(1.0, 0.0), 88.0);
  // The two terms cross at p - q = 72 / 88.
  EXPECT_NEAR(admissible_c(72.0 / 88.0, 0.0), 88.0 * 88.0 / 72.0, 1e-9);
  EXPECT_THROW(admissible_c(0.5, 0.5), Error);
  EXPECT_THROW(admissible_c(0.3, 0.5), Error);
}

TEST(ConstantsTest, DerivedValues) {
  const Constants c = Constants::admissible(0.7, 0.3);
  EXPECT_NEAR(c.c_prime, 180.0, 1e-9);
  EXPECT_NEAR(c.epsilon, 8.0 / 172.0, 1e-12);
  EXPECT_NEAR(c.sigma, std::sqrt(0.21), 1e-15);
  EXPECT_EQ(c.K, 1.0);
  const Constants noiseless = Constants::admissible(1.0, 0.0);
  EXPECT_DOUBLE_EQ(noiseless.c_prime, 88.0);
  EXPECT_DOUBLE_EQ(noiseless.epsilon, 0.1);
  EXPECT_EQ(noiseless.sigma, 0.0);
  EXPECT_THROW(Constants::from_c(0.7, 0.3, 40.0), Error);  // c' = 16
  EXPECT_NO_THROW(Constants::from_c(0.7, 0.3, 41.0));
}

TEST(ConstantsTest, EpsilonDecreasesInC) {
  double last = std::numeric_limits<double>::infinity();
  for (double c = 50.0; c < 2000.0; c *= 1.5) {
    const double eps = Constants::from_c(0.6, 0.1, c).epsilon;
    EXPECT_LT(eps, last);
    last = eps;
  }
}

TEST(ConstantsTest, SigmaIsLargerStandardDeviation) {
  EXPECT_DOUBLE_EQ(noise_sigma(0.9, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(noise_sigma(1.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(noise_sigma(0.8, 0.1), 0.4);
}

TEST(TheoreticalSpectrumTest, MatchesExpectationMatrix) {
  for (const auto& [l, s, p, q] : std::vector<std::tuple<int, int, double, double>>{
           {3, 4, 0.7, 0.3}, {1, 5, 0.9, 0.2}, {4, 2, 1.0, 0.0}}) {
    const std::vector<double> want = theoretical_spectrum(l, s, p, q);
    const Eigen::VectorXd got =
        eigenvalues_descending(expectation_matrix(make_partition(l * s, s), {p, q, 0}));
    ASSERT_EQ(static_cast<Eigen::Index>(want.size()), got.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_NEAR(got(static_cast<Eigen::Index>(i)), want[i], 1e-12);
    }
  }
  EXPECT_THAT(theoretical_spectrum(3, 4, 0.7, 0.3),
              ElementsAre(testing::DoubleNear(5.2, 1e-12), testing::DoubleNear(1.6, 1e-12),
                          testing::DoubleNear(1.6, 1e-12), 0, 0, 0, 0, 0, 0, 0, 0, 0));
}

TEST(ClusterMaskTest, HexAndMembers) {
  const std::vector<std::int64_t> ids = {0, 2};
  const ClusterMask m = ClusterMask::of(5, ids);
  EXPECT_EQ(m.to_hex(), "5");
  EXPECT_EQ(m.count(), 2);
  EXPECT_THAT(m.clusters(), ElementsAre(0, 2));
  EXPECT_EQ(ClusterMask(3).to_hex(), "0");
  EXPECT_EQ(ClusterMask::all(8).to_hex(), "ff");
  ClusterMask wide(70);
  wide.set(64);
  wide.set(0);
  EXPECT_EQ(wide.to_hex(), "10000000000000001");
  wide.reset(0);
  EXPECT_EQ(wide.to_hex(), "10000000000000000");
  EXPECT_THROW(wide.set(70), Error);
}

TEST(BoundReportTest, RelationsAndTolerance) {
  EXPECT_TRUE(make_report("a", 1.0, 1.0, Relation::kAtMost, 0.0, {}).satisfied);
  EXPECT_FALSE(make_report("a", 1.1, 1.0, Relation::kAtMost, 0.0, {}).satisfied);
  EXPECT_TRUE(make_report("a", 1.1, 1.0, Relation::kAtMost, 0.2, {}).satisfied);
  EXPECT_FALSE(make_report("a", 0.9, 1.0, Relation::kAtLeast, 0.0, {}).satisfied);
  EXPECT_FALSE(make_report("a", std::nan(""), 1.0, Relation::kAtMost, 0.0, {}).satisfied);
}

TEST(NormChecksTest, NoiselessInstanceHasNoDeviation) {
  const PlantedPartition part = make_partition(12, 4);
  const ModelParams params{1.0, 0.0, 0};
  SymMatrix g_hat = sample_graph(part, params).to_matrix();
  g_hat += SymMatrix::identity(12);
  const SymMatrix g = expectation_matrix(part, params);
  EXPECT_EQ(check_norm_deviation(g_hat, g).lhs, 0.0);
  EXPECT_TRUE(check_weyl(g_hat, g).satisfied);
  const BoundReport row = check_row_sum_bound(g);
  EXPECT_NEAR(row.lhs, 4.0, 1e-12);
  EXPECT_EQ(row.rhs, 4.0);
  EXPECT_TRUE(row.satisfied);
  EXPECT_THROW(check_norm_deviation(g, SymMatrix(3)), Error);
}

TEST(NormChecksTest, RandomInstanceSatisfiesWeylAndRowSum) {
  const Instance inst = make_instance(CellSpec{60, 15, 0.6, 0.2}, 3);
  SymMatrix g_hat = inst.graph.to_matrix();
  g_hat += SymMatrix::identity(60) * 0.6;
  const SymMatrix g = expectation_matrix(inst.truth, {0.6, 0.2, 0});
  EXPECT_TRUE(check_weyl(g_hat, g).satisfied);
  EXPECT_TRUE(check_row_sum_bound(g_hat).satisfied);
  const BoundReport norm = check_norm_deviation(g_hat, g);
  EXPECT_DOUBLE_EQ(norm.rhs, 8.0 * std::sqrt(60.0));
  EXPECT_TRUE(norm.satisfied);
}

TEST(SeparationTest, NoiselessSpectrum) {
  // l = 3 blocks of s = 4 with p = 1, q = 0: G_J has eigenvalue 4 three
  // times and 0 otherwise.
  const PlantedPartition part = make_partition(12, 4);
  const SymMatrix g = expectation_matrix(part, {1.0, 0.0, 0});
  const SeparationReports r = check_separation(g, g, 3, 17.0, {});
  EXPECT_NEAR(r.top_lower.lhs, 4.0, 1e-12);
  EXPECT_NEAR(r.top_lower.rhs, 9.0 * std::sqrt(12.0), 1e-12);
  EXPECT_FALSE(r.top_lower.satisfied);
  EXPECT_TRUE(r.top_upper.satisfied);
  EXPECT_NEAR(r.rest.lhs, 0.0, 1e-12);
  EXPECT_TRUE(r.rest.satisfied);
  EXPECT_TRUE(r.norm_premise_held);
  EXPECT_THROW(check_separation(g, g, 0, 17.0, {}), Error);
}

TEST(ProjectorDeviationTest, IdenticalInputs) {
  const SymMatrix g = expectation_matrix(make_partition(12, 3), {0.8, 0.1, 0});
  const ProjectorDeviationReports r = check_projector_deviation(g, g, 4);
  EXPECT_NEAR(r.spectral, 0.0, 1e-12);
  EXPECT_NEAR(r.spectral_instance.rhs, 0.0, 1e-12);
  EXPECT_TRUE(r.spectral_instance.satisfied);
  EXPECT_TRUE(r.spectral_trivial.satisfied);
  EXPECT_TRUE(r.frobenius_rank.satisfied);
}

TEST(ProjectorDeviationTest, InstanceBoundInfiniteWithoutGap) {
  const SymMatrix g = expectation_matrix(make_partition(8, 4), {0.6, 0.4, 0});
  SymMatrix g_hat = g;
  g_hat.set(0, 5, 5.0);
  const ProjectorDeviationReports r = check_projector_deviation(g_hat, g, 2);
  EXPECT_TRUE(std::isinf(r.spectral_instance.rhs));
  EXPECT_TRUE(r.spectral_instance.satisfied);
}

TEST(ProjectorDeviationTest, RankInequalityOnLines) {
  // Two lines at angle t: ||A - B||_2 = sin t and ||A - B||_F^2 = 2 sin^2 t,
  // so the inequality is tight for l = 1.
  const double t = 0.3;
  Eigen::MatrixXd a(2, 1);
  Eigen::MatrixXd b(2, 1);
  a << 1, 0;
  b << std::cos(t), std::sin(t);
  const BoundReport r = check_projector_rank_inequality(Projector::from_orthonormal_basis(a),
                                                        Projector::from_orthonormal_basis(b));
  EXPECT_NEAR(r.lhs, 2.0 * std::sin(t) * std::sin(t), 1e-14);
  EXPECT_NEAR(r.rhs, r.lhs, 1e-14);
  EXPECT_TRUE(r.satisfied);
}

TEST(ProjectorDeviationTest, TheoremReport) {
  const Constants c = Constants::admissible(1.0, 0.0);
  EXPECT_TRUE(check_projector_deviation_theorem(0.1, c).satisfied);
  EXPECT_FALSE(check_projector_deviation_theorem(0.11, c).satisfied);
}

TEST(GoodColumnTest, ExactProjector) {
  const PlantedPartition part = make_partition(12, 4);
  const SymMatrix h = true_cluster_matrix(part);
  const Projector p(h * 0.25, 3);
  EXPECT_NEAR(empirical_epsilon(p, h, 4), 0.0, 1e-15);
  const BoundReport r = check_good_column(p, 4, 0.1);
  // Mass sqrt(4) = 2 against (1 - 0.08 - 0.1) * 2.
  EXPECT_NEAR(r.lhs, 2.0, 1e-12);
  EXPECT_NEAR(r.rhs, 1.64, 1e-12);
  EXPECT_TRUE(r.satisfied);
  EXPECT_THROW(check_good_column(p, 4, 0.0), Error);
  EXPECT_THROW(check_good_column(p, 4, 0.2), Error);
}

TEST(PurityTest, Boundary) {
  const PlantedPartition part = make_partition(20, 10);
  VertexSet w = {0, 1, 2, 3, 4, 5, 6, 10, 11, 12};  // 7 from cluster 0
  EXPECT_TRUE(check_purity(w, part, 0.1).satisfied);   // 7 >= 7
  EXPECT_FALSE(check_purity(w, part, 0.09).satisfied);  // 7 < 7.3
  EXPECT_EQ(check_purity(part.members(1), part, 0.01).lhs, 10.0);
  EXPECT_THROW(check_purity(VertexSet{0, 1}, part, 0.1), Error);
}

TEST(ConcentrationTest, NoiselessHasNoViolations) {
  const Instance inst = make_instance(CellSpec{30, 10, 1.0, 0.0}, 1);
  const ConcentrationReport r =
      check_concentration(inst.graph, inst.truth, {1.0, 0.0, 0}, 0.1);
  // Inside counts are s - 1 = 9, exactly the threshold (1 - 0.1) * 10.
  EXPECT_EQ(r.violation_count, 0);
  EXPECT_TRUE(r.in_cluster.satisfied);
  EXPECT_EQ(r.in_cluster.lhs, 9.0);
  EXPECT_EQ(r.out_cluster.lhs, 0.0);
  EXPECT_TRUE(r.separation.satisfied);
  EXPECT_THROW(check_concentration(inst.graph, inst.truth, {1.0, 0.0, 0}, 0.0), Error);
}

TEST(ConcentrationTest, ViolationsMatchBinomialOracle) {
  // n = 400, k = 4, p = 0.7, q = 0.3, eps = 0.1. A vertex sees Bin(99, p)
  // neighbours in its own cluster and Bin(100, q) in each other one.
  const double p = 0.7;
  const double q = 0.3;
  const double eps = 0.1;
  const double in_thr = (p - eps) * 100.0;
  const double out_thr = (q + eps) * 100.0;
  const std::vector<double> in_pmf = binomial_pmf(99, p);
  const std::vector<double> out_pmf = binomial_pmf(100, q);
  double in_tail = 0.0;
  double out_tail = 0.0;
  for (int x = 0; x <= 99; ++x) in_tail += x < in_thr ? in_pmf[static_cast<std::size_t>(x)] : 0.0;
  for (int x = 0; x <= 100; ++x) out_tail += x > out_thr ? out_pmf[static_cast<std::size_t>(x)] : 0.0;
  const double expected = 400.0 * in_tail + 1200.0 * out_tail;
  EXPECT_NEAR(expected, 22.04, 0.01);

  const int seeds = 40;
  double total = 0.0;
  for (int seed = 0; seed < seeds; ++seed) {
    const Instance inst = make_instance(CellSpec{400, 100, p, q}, static_cast<std::uint64_t>(seed));
    total += static_cast<double>(
        check_concentration(inst.graph, inst.truth, {p, q, 0}, eps).violation_count);
  }
  // Counts are roughly Poisson, so the mean over 40 seeds has a standard
  // error near 0.75.
  EXPECT_NEAR(total / seeds, expected, 4.0);
}

TEST(ConcentrationTest, RecordCap) {
  const Instance inst = make_instance(CellSpec{100, 50, 0.6, 0.4}, 2);
  const ConcentrationReport r = check_concentration(inst.graph, inst.truth, {0.6, 0.4, 0}, 0.01,
                                                    {}, 3);
  EXPECT_GT(r.violation_count, 3);
  EXPECT_EQ(r.violations.size(), 3u);
  EXPECT_TRUE(r.overflow);
}

TEST(UnionFamilyTest, EnumeratedAndSampled) {
  const auto small = cluster_union_family(4, 0);
  EXPECT_EQ(small.size(), 15u);
  EXPECT_TRUE(std::is_sorted(small.begin(), small.end()));
  const auto sampled = cluster_union_family(20, 5, 12, 100);
  EXPECT_EQ(sampled.size(), 100u);
  EXPECT_EQ(std::set<ClusterMask>(sampled.begin(), sampled.end()).size(), 100u);
  EXPECT_EQ(sampled, cluster_union_family(20, 5, 12, 100));
  EXPECT_EQ(cluster_union_family(3, 0, 1, 1000).size(), 7u);
  EXPECT_THROW(cluster_union_family(0, 0), Error);
}

TEST(FkTest, NoiselessNoiseIsZeroAndRhsScales) {
  const Instance inst = make_instance(CellSpec{20, 10, 1.0, 0.0}, 0);
  const SymMatrix x = noise_matrix(inst.graph, inst.truth, {1.0, 0.0, 0});
  EXPECT_EQ(frobenius_norm(x), 0.0);
  const std::vector<std::int64_t> one = {0};
  const std::vector<ClusterMask> family = {ClusterMask::of(2, one), ClusterMask::all(2)};
  const auto reports = check_fk_submatrices(x, inst.truth, family, 0.5, 1.0);
  ASSERT_EQ(reports.size(), 2u);
  // 2 (0.5 + 3) sqrt(10) and sqrt(20).
  EXPECT_NEAR(reports[0].rhs, 7.0 * std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(reports[1].rhs, 7.0 * std::sqrt(20.0), 1e-12);
  EXPECT_EQ(reports[0].context.subset, "1");
  EXPECT_EQ(reports[1].context.subset, "3");
  EXPECT_THROW(check_fk_submatrices(x, inst.truth, {}, 0.5, 1.0), Error);
}

TEST(FkTest, HundredVertexSetRhs) {
  const PlantedPartition part = make_partition(100, 100);
  const SymMatrix x(100);
  const std::vector<ClusterMask> family = {ClusterMask::all(1)};
  EXPECT_NEAR(check_fk_submatrices(x, part, family, 0.5, 1.0)[0].rhs, 70.0, 1e-12);
}

}  // namespace
}  // namespace planted
