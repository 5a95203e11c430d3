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

#include "planted/spectral.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "planted/error.h"
#include "planted/random.h"

namespace planted {
namespace {

SymMatrix random_symmetric(Eigen::Index n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  SymMatrix a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) a.set(i, j, 2.0 * rng.uniform() - 1.0);
  }
  return a;
}

SymMatrix complete_graph(Eigen::Index n) {
  SymMatrix a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) a.set(i, j, 1.0);
  }
  return a;
}

// Largest |eigenvalue| by power iteration on A^2, which avoids sign
// cancellation between +lambda and -lambda.
double power_norm(const SymMatrix& a) {
  const Eigen::MatrixXd a2 = a.dense() * a.dense();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(a.dim()) + Eigen::VectorXd::LinSpaced(a.dim(), 0, 1);
  double value = 0.0;
  for (int it = 0; it < 5000; ++it) {
    Eigen::VectorXd y = a2 * x;
    value = y.norm() / x.norm();
    x = y / y.norm();
  }
  return std::sqrt(value);
}

TEST(SymMatrixTest, SymmetrizesAndStaysSymmetric) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 4, 3;
  SymMatrix a(m);
  EXPECT_EQ(a(0, 1), 3.0);
  EXPECT_EQ(a(1, 0), 3.0);
  a.set(1, 0, -1.0);
  EXPECT_EQ(a(0, 1), -1.0);
  EXPECT_THROW(SymMatrix(Eigen::MatrixXd(2, 3)), Error);
}

TEST(EighTest, TwoByTwoClosedForm) {
  Eigen::MatrixXd m(2, 2);
  m << 2, 1, 1, 2;
  const SpectralDecomposition d = eigh_descending(SymMatrix(m));
  EXPECT_NEAR(d.eigenvalues(0), 3.0, 1e-14);
  EXPECT_NEAR(d.eigenvalues(1), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(d.eigenvectors(0, 0)), std::sqrt(0.5), 1e-14);
}

TEST(EighTest, LapackAndJacobiAgree) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SymMatrix a = random_symmetric(25, seed);
    const SpectralDecomposition lapack = eigh_descending(a, EigenSolver::kLapack);
    const SpectralDecomposition jacobi = eigh_descending(a, EigenSolver::kJacobi);
    EXPECT_LT((lapack.eigenvalues - jacobi.eigenvalues).cwiseAbs().maxCoeff(), 1e-10);
    for (const auto* d : {&lapack, &jacobi}) {
      const Eigen::MatrixXd& v = d->eigenvectors;
      EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(25, 25)).norm(), 1e-10);
      EXPECT_LT((a.dense() * v - v * d->eigenvalues.asDiagonal()).norm(), 1e-9);
    }
    for (Eigen::Index i = 1; i < 25; ++i) {
      EXPECT_GE(lapack.eigenvalues(i - 1), lapack.eigenvalues(i));
    }
  }
}

TEST(EighTest, RejectsNonFinite) {
  SymMatrix a(2);
  a.set(0, 1, std::nan(""));
  EXPECT_THROW(eigh_descending(a), Error);
  EXPECT_THROW(spectral_norm(a), Error);
}

TEST(JacobiTest, ConvergesOnDiagonalAndDense) {
  const JacobiResult diag = jacobi_eigh(SymMatrix::identity(4));
  EXPECT_TRUE(diag.converged);
  EXPECT_EQ(diag.sweeps, 0);
  const JacobiResult dense = jacobi_eigh(random_symmetric(12, 4));
  EXPECT_TRUE(dense.converged);
  EXPECT_GT(dense.sweeps, 0);
}

TEST(TopEigenpairsTest, MatchesFullDecomposition) {
  const SymMatrix a = random_symmetric(40, 9);
  const SpectralDecomposition full = eigh_descending(a);
  const SpectralDecomposition top = top_eigenpairs(a, 5);
  ASSERT_EQ(top.eigenvalues.size(), 5);
  EXPECT_LT((top.eigenvalues - full.eigenvalues.head(5)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(top_eigenpairs(a, 0), Error);
  EXPECT_THROW(top_eigenpairs(a, 41), Error);
}

TEST(TopEigenpairsTest, DegenerateCompleteGraph) {
  // K_10 has spectrum {9, -1 x 9}; asking for two pairs splits the
  // degenerate -1 eigenspace.
  const SymMatrix a = complete_graph(10);
  const SpectralDecomposition top = top_eigenpairs(a, 2);
  ASSERT_EQ(top.eigenvalues.size(), 2);
  EXPECT_NEAR(top.eigenvalues(0), 9.0, 1e-12);
  EXPECT_NEAR(top.eigenvalues(1), -1.0, 1e-12);
  const Eigen::MatrixXd& v = top.eigenvectors;
  EXPECT_LT((a.dense() * v - v * top.eigenvalues.asDiagonal()).norm(), 1e-10);
  EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-12);
  const SpectralDecomposition all = top_eigenpairs(a, 10);
  EXPECT_NEAR(all.eigenvalues(9), -1.0, 1e-12);
}

TEST(NormTest, SpectralMatchesPowerIteration) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SymMatrix a = random_symmetric(15, seed);
    EXPECT_NEAR(spectral_norm(a), power_norm(a), 1e-8);
  }
  EXPECT_NEAR(spectral_norm(complete_graph(6)), 5.0, 1e-12);
}

TEST(NormTest, FrobeniusBySum) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 2, -2;
  EXPECT_DOUBLE_EQ(frobenius_norm(SymMatrix(m)), 3.6055512754639891);
}

TEST(ProjectorTest, TopProjectorIsAProjector) {
  const SymMatrix a = random_symmetric(30, 2);
  const Projector p = top_projector(a, 4);
  EXPECT_EQ(p.rank(), 4);
  const ProjectorDefects d = projector_defects(p);
  EXPECT_LT(d.idempotency, 1e-12);
  EXPECT_LT(d.trace_error, 1e-12);
  EXPECT_LT(d.eigenvalue_error, 1e-12);
  EXPECT_THROW(top_projector(a, 0), Error);
}

TEST(ProjectorTest, BlockOfOnesProjector) {
  // The top eigenvector of K_n is the normalized all-ones vector, so
  // P_1 = J / n.
  const Projector p = top_projector(complete_graph(5), 1);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) EXPECT_NEAR(p(i, j), 0.2, 1e-14);
  }
  const std::vector<Vertex> w = {0, 1, 2};
  // P 1_W = (3/5) 1, of norm 3 / sqrt(5).
  EXPECT_NEAR(projector_column_mass(p, w), 3.0 / std::sqrt(5.0), 1e-14);
  EXPECT_EQ(projector_column_mass(p, std::vector<Vertex>{}), 0.0);
}

TEST(ProjectorTest, DefectsDetectNonProjector) {
  const Projector fake(SymMatrix::identity(3) * 0.5, 1);
  const ProjectorDefects d = projector_defects(fake);
  EXPECT_NEAR(d.trace_error, 0.5, 1e-15);
  EXPECT_NEAR(d.eigenvalue_error, 0.5, 1e-15);
  EXPECT_NEAR(d.idempotency, std::sqrt(3.0) * 0.25, 1e-15);
}

TEST(PrincipalSubmatrixTest, PicksAscendingRows) {
  const SymMatrix a = random_symmetric(6, 1);
  const std::vector<Vertex> rows = {4, 1};
  const SymMatrix sub = principal_submatrix(a, rows);
  EXPECT_EQ(sub(0, 1), a(1, 4));
  EXPECT_EQ(sub(1, 1), a(4, 4));
}

}  // namespace
}  // namespace planted
