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

// Neural tangent kernel of the first-layer weights:
//
//   Theta(x, x') = (x . x' / d) * sum_j lambda_j sigma'(Z_j(x)) sigma'(Z_j(x'))
//
// and its Gram matrix over a dataset (the NTG), split by the symmetric and
// asymmetric parts of lambda.

#ifndef ASYMNET_KERNEL_HPP
#define ASYMNET_KERNEL_HPP

#include <Eigen/Dense>

#include <cstddef>

#include "asymnet/eigensolver.hpp"
#include "asymnet/network.hpp"
#include "asymnet/rng.hpp"
#include "asymnet/scaling.hpp"

namespace asymnet {

struct NTGMatrix {
  Eigen::MatrixXd values;  // part1 + part2
  Eigen::MatrixXd part1;   // from lambda.gamma_part
  Eigen::MatrixXd part2;   // from lambda.asym_part

  Eigen::Index n() const { return values.rows(); }
};

double ntk(const Network& net, const LambdaVector& lambdas, const VectorRef& x,
           const VectorRef& xp);

NTGMatrix ntg(const Network& net, const LambdaVector& lambdas, const MatrixRef& X);

/// Only the combined matrix; skips the part split (a third of the work).
Eigen::MatrixXd ntg_values(const Network& net, const LambdaVector& lambdas,
                           const MatrixRef& X);

struct MeanKernelEstimate {
  Eigen::MatrixXd mean;            // estimate of the mean NTG Theta*(X)
  Eigen::MatrixXd standard_error;  // per entry
  std::size_t samples = 0;
};

/// Monte Carlo estimate of Theta*(x_i, x_i') = (x_i.x_i'/d) E[sigma'(w.x_i/sqrt d) sigma'(w.x_i'/sqrt d)],
/// w ~ N(0, I_d). Needs samples >= 100.
MeanKernelEstimate mean_ntg_mc(const MatrixRef& X, Activation activation,
                               std::size_t samples, const Rng& rng);

struct KappaEstimate {
  double value = 0.0;
  double half_width = 0.0;  // n * max entry standard error
  bool near_singular = false;  // value < 1e-8
};

/// Minimum eigenvalue of the Monte Carlo mean NTG.
KappaEstimate kappa_n(const MatrixRef& X, Activation activation, std::size_t samples,
                      const Rng& rng);

/// ||A - B||_2 via Jacobi on the symmetric difference.
double ntg_distance(const NTGMatrix& A, const NTGMatrix& B);
double ntg_distance(const Eigen::Ref<const Eigen::MatrixXd>& A,
                    const Eigen::Ref<const Eigen::MatrixXd>& B);

}  // namespace asymnet

#endif  // ASYMNET_KERNEL_HPP
