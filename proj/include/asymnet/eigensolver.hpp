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

#ifndef ASYMNET_EIGENSOLVER_HPP
#define ASYMNET_EIGENSOLVER_HPP

#include <Eigen/Dense>

namespace asymnet {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column i pairs with values[i]; empty unless requested
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. The input is symmetrized
/// as (S + S^T) / 2; asymmetry above 1e-9 * max(1, max|S_ij|) is a domain
/// error and any non-finite entry a numeric error. Sweeps continue until the
/// off-diagonal Frobenius norm drops below rel_tol * ||S||_F.
SymmetricEigen jacobi_eigen(const Eigen::Ref<const Eigen::MatrixXd>& S,
                            bool want_vectors = false, double rel_tol = 1e-12);

double min_eigenvalue(const Eigen::Ref<const Eigen::MatrixXd>& S);

/// Largest |eigenvalue|, i.e. the spectral norm of a symmetric matrix.
double spectral_norm_symmetric(const Eigen::Ref<const Eigen::MatrixXd>& S);

struct SpectralSummary {
  double min_eig = 0.0;
  double max_eig = 0.0;
  double trace = 0.0;
};

SpectralSummary spectral_summary(const Eigen::Ref<const Eigen::MatrixXd>& S);

}  // namespace asymnet

#endif  // ASYMNET_EIGENSOLVER_HPP
