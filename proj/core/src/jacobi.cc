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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "planted/error.h"
#include "planted/spectral.h"

namespace planted {
namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

JacobiResult jacobi_eigh(const SymMatrix& a, const JacobiOptions& options) {
  if (!a.all_finite()) {
    throw Error(ErrorCode::kNonFinite, "jacobi_eigh: matrix has non-finite entries");
  }
  const Eigen::Index m = a.dim();
  Eigen::MatrixXd work = a.dense();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(m, m);
  const double threshold = options.relative_tolerance * work.norm();

  JacobiResult result;
  result.converged = off_diagonal_norm(work) <= threshold;
  while (!result.converged && result.sweeps < options.max_sweeps) {
    for (Eigen::Index p = 0; p + 1 < m; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const double apq = work(p, q);
        if (apq == 0.0) continue;
        // Rotation that zeroes (p, q); t is the smaller root of
        // t^2 + 2 theta t - 1 = 0.
        const double theta = (work(q, q) - work(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double akp = work(k, p);
          const double akq = work(k, q);
          work(k, p) = c * akp - s * akq;
          work(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const double apk = work(p, k);
          const double aqk = work(q, k);
          work(p, k) = c * apk - s * aqk;
          work(q, k) = s * apk + c * aqk;
        }
        work(p, q) = 0.0;
        work(q, p) = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    ++result.sweeps;
    result.converged = off_diagonal_norm(work) <= threshold;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return work(x, x) > work(y, y);
  });
  result.decomposition.eigenvalues.resize(m);
  result.decomposition.eigenvectors.resize(m, m);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto dst = static_cast<Eigen::Index>(i);
    result.decomposition.eigenvalues(dst) = work(order[i], order[i]);
    result.decomposition.eigenvectors.col(dst) = v.col(order[i]);
  }
  return result;
}

}  // namespace planted
