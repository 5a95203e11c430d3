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

#ifndef PLANTED_SPECTRAL_H_
#define PLANTED_SPECTRAL_H_

#include <span>

#include <Eigen/Dense>

#include "planted/types.h"

namespace planted {

// Dense real symmetric matrix. Every constructor and mutator keeps
// entries(i, j) == entries(j, i) bit-for-bit.
class SymMatrix {
 public:
  SymMatrix() = default;

  // Zero matrix of size dim x dim.
  explicit SymMatrix(Eigen::Index dim);

  // Symmetrizes `m` as (m + m^T) / 2, which is exact for already-symmetric
  // input. Throws kDimensionMismatch for non-square input.
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return data_.rows(); }

  double operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }

  // Writes both (i, j) and (j, i).
  void set(Eigen::Index i, Eigen::Index j, double value);

  const Eigen::MatrixXd& dense() const noexcept { return data_; }

  bool all_finite() const { return data_.allFinite(); }

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double scale);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double scale) { return a *= scale; }
  friend SymMatrix operator*(double scale, SymMatrix a) { return a *= scale; }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.data_.rows() == b.data_.rows() && a.data_ == b.data_;
  }

 private:
  Eigen::MatrixXd data_;
};

// Rows/columns restricted to the index set, taken in ascending order.
// Throws kEmptySet.
SymMatrix principal_submatrix(const SymMatrix& a, std::span<const Vertex> rows);

// Eigenvalues in descending order, with the matching orthonormal
// eigenvectors as columns.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

enum class EigenSolver {
  // LAPACK divide-and-conquer (dsyevd) / MRRR (dsyevr for partial spectra).
  kLapack,
  // Cyclic Jacobi rotations, implemented in-house.
  kJacobi,
};

// Full eigendecomposition, eigenvalues descending. Ties keep the solver's
// ascending-output order reversed stably, so the result is deterministic
// for a fixed input. Throws kNonFinite.
SpectralDecomposition eigh_descending(const SymMatrix& a,
                                      EigenSolver solver = EigenSolver::kLapack);

// Eigenvalues only, descending. Throws kNonFinite.
Eigen::VectorXd eigenvalues_descending(const SymMatrix& a);

// The `count` largest eigenpairs, descending. Throws kRankOutOfRange unless
// 1 <= count <= dim, kNonFinite for non-finite input.
SpectralDecomposition top_eigenpairs(const SymMatrix& a, Eigen::Index count);

struct JacobiOptions {
  // Converged when the off-diagonal Frobenius norm is at most
  // relative_tolerance * ||A||_F.
  double relative_tolerance = 1e-11;
  int max_sweeps = 100;
};

struct JacobiResult {
  SpectralDecomposition decomposition;
  int sweeps = 0;
  bool converged = false;
};

// Cyclic-by-row Jacobi eigensolver with a fixed sweep order.
JacobiResult jacobi_eigh(const SymMatrix& a, const JacobiOptions& options = {});

// Orthogonal projector onto an l-dimensional subspace.
class Projector {
 public:
  Projector() = default;

  // P = V V^T for a matrix V with orthonormal columns. The rank is the
  // number of columns of V.
  static Projector from_orthonormal_basis(const Eigen::MatrixXd& basis);

  // Wraps an already-formed projector matrix of the stated rank. No checks
  // beyond dimensions; see projector_defects() for validation.
  Projector(SymMatrix matrix, Eigen::Index rank);

  Eigen::Index dim() const noexcept { return matrix_.dim(); }
  Eigen::Index rank() const noexcept { return rank_; }
  const SymMatrix& matrix() const noexcept { return matrix_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return matrix_(i, j); }

 private:
  SymMatrix matrix_;
  Eigen::Index rank_ = 0;
};

// P_l(A): projector onto the span of the eigenvectors of the l largest
// eigenvalues. Throws kRankOutOfRange unless 1 <= l <= dim.
Projector top_projector(const SymMatrix& a, Eigen::Index l);

// max_i |lambda_i(A)|. Throws kNonFinite.
double spectral_norm(const SymMatrix& a);

// sqrt(sum a_ij^2). Throws kNonFinite.
double frobenius_norm(const SymMatrix& a);

// ||P 1_w||_2 for a vertex set w of the projector's index space.
double projector_column_mass(const Projector& p, std::span<const Vertex> w);

// Measured deviations of a projector from the algebraic identities it must
// satisfy; used by tests and internal invariant checks.
struct ProjectorDefects {
  double idempotency = 0.0;  // ||P^2 - P||_F
  double trace_error = 0.0;  // |trace(P) - rank|
  double eigenvalue_error = 0.0;  // max distance of an eigenvalue from {0, 1}
};
ProjectorDefects projector_defects(const Projector& p);

}  // namespace planted

#endif  // PLANTED_SPECTRAL_H_
