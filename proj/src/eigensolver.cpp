// Copyright 2026 The asymnet Authors
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

#include "asymnet/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "asymnet/error.hpp"

namespace asymnet {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Eigen::MatrixXd& A) {
  double s = 0.0;
  for (Eigen::Index q = 0; q < A.cols(); ++q) {
    for (Eigen::Index p = 0; p < A.rows(); ++p) {
      if (p != q) s += A(p, q) * A(p, q);
    }
  }
  return std::sqrt(s);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Eigen::Ref<const Eigen::MatrixXd>& S,
                            bool want_vectors, double rel_tol) {
  require(S.rows() == S.cols(), ErrorKind::kShape, "eigensolver needs a square matrix");
  require(S.allFinite(), ErrorKind::kNumeric, "matrix has non-finite entries");
  const Eigen::Index n = S.rows();
  SymmetricEigen out;
  if (n == 0) return out;

  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    fail(ErrorKind::kDomain, "matrix is not symmetric within 1e-9");
  }
  Eigen::MatrixXd A = 0.5 * (S + S.transpose());
  Eigen::MatrixXd V;
  if (want_vectors) V = Eigen::MatrixXd::Identity(n, n);

  const double target = rel_tol * A.norm();
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(A) <= target) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        // Rotation angle from the stable tangent formula.
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = A(k, p);
          const double akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = A(p, k);
          const double aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        if (want_vectors) {
          for (Eigen::Index k = 0; k < n; ++k) {
            const double vkp = V(k, p);
            const double vkq = V(k, q);
            V(k, p) = c * vkp - s * vkq;
            V(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
  }
  if (sweep == kMaxSweeps && off_diagonal_norm(A) > target) {
    fail(ErrorKind::kNumeric, "Jacobi iteration did not converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return A(i, i) < A(j, j); });
  out.values.resize(n);
  if (want_vectors) out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.values[i] = A(src, src);
    if (want_vectors) out.vectors.col(i) = V.col(src);
  }
  out.sweeps = sweep;
  return out;
}

double min_eigenvalue(const Eigen::Ref<const Eigen::MatrixXd>& S) {
  return jacobi_eigen(S).values.minCoeff();
}

double spectral_norm_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& S) {
  return jacobi_eigen(S).values.cwiseAbs().maxCoeff();
}

SpectralSummary spectral_summary(const Eigen::Ref<const Eigen::MatrixXd>& S) {
  const auto eig = jacobi_eigen(S);
  return {eig.values.minCoeff(), eig.values.maxCoeff(), S.trace()};
}

}  // namespace asymnet
