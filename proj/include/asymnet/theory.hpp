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

// Closed-form theoretical quantities and the Monte Carlo estimators that
// check them:
//
//  * Gaussian expectations g1 and g2 entering the expected first-step weight
//    change and the expected first-step kernel change;
//  * the expected weight change E[dw_jk/dt at t=0] = -(lambda_j/sqrt d) sum_i x_ik g1(x_i);
//  * the expected kernel change
//      E[dTheta(x_k,x_l)/dt at t=0] = -(x_k.x_l / d^1.5) (sum_j lambda_j^2)
//          sum_i [(x_k.x_i) g2(x_k,x_l,x_i) + (x_l.x_i) g2(x_l,x_k,x_i)];
//  * the variance constant C0(X) of the initial tangent Gram matrix;
//  * the width requirements and high-probability bounds of the global
//    convergence results (reported, never enforced).
//
// Estimators that average over fresh networks use antithetic pairs (a, -a):
// the target-dependent terms are odd in a and cancel exactly within a pair.

#ifndef ASYMNET_THEORY_HPP
#define ASYMNET_THEORY_HPP

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "asymnet/activation.hpp"
#include "asymnet/network.hpp"
#include "asymnet/rng.hpp"
#include "asymnet/scaling.hpp"

namespace asymnet {

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
};

struct TheoryParams {
  double C = 1.0;       // max |y_i|
  double M = 0.0;       // sup |sigma''|
  double C1 = 0.0;      // sup_c E[sigma(c z / sqrt d)^2]
  double delta = 0.1;   // failure probability
  double D0 = 0.0;      // sqrt(2 C^2 + 2 / d)

  static TheoryParams make(double C, Activation activation, double C1, double delta,
                           std::size_t d);
  void validate() const;
};

struct BoundReport {
  bool relu = true;
  std::array<double, 3> width_terms{};
  double width_required = 0.0;  // max of width_terms
  double decay_rate = 0.0;      // gamma * kappa_n / 2
  Eigen::VectorXd weight_bound; // per node bound on ||w_tj - w_0j||
  double ntg_bound = 0.0;       // bound on ||NTG_t - NTG_0||_2
};

/// g1(x) = E[sigma(z|x|/sqrt d) sigma'(z|x|/sqrt d)], z ~ N(0,1). Exact
/// |x|/sqrt(2 pi d) for ReLU (se = 0); antithetic Monte Carlo otherwise.
McEstimate g1(const VectorRef& x, Activation activation, std::size_t samples,
              const Rng& rng);

struct WeightChangeTable {
  Eigen::MatrixXd mean;  // m x d
  Eigen::MatrixXd se;    // m x d
};

/// Closed form for every (j, k); g1 is evaluated once per input row.
WeightChangeTable expected_first_step_weight_changes(const LambdaVector& lambdas,
                                                     const MatrixRef& X,
                                                     Activation activation,
                                                     std::size_t samples, const Rng& rng);

/// Single entry of the table above (0-based j < m, k < d).
double expected_first_step_weight_change(const LambdaVector& lambdas, const MatrixRef& X,
                                         Activation activation, std::size_t j,
                                         std::size_t k, std::size_t samples = 200000,
                                         const Rng& rng = Rng(0));

/// Empirical side: dW/dt at t = 0 averaged over fresh initializations
/// (replications antithetic pairs, >= 100).
WeightChangeTable mc_first_step_weight_change(const LambdaVector& lambdas,
                                              const MatrixRef& X, const MatrixRef& Y,
                                              Activation activation,
                                              std::size_t replications, const Rng& rng);

/// g2(xk, xl, xi) = E[sigma''(z1) sigma'(z2) sigma'(z3) sigma(z3)] with
/// (z1, z2, z3) ~ N(0, Sigma), Sigma = Gram(xk, xl, xi) / d, sampled through
/// the spectral factor of Sigma (eigenvalues floored at 1e-12).
McEstimate g2_mc(const VectorRef& xk, const VectorRef& xl, const VectorRef& xi,
                 Activation activation, std::size_t samples, const Rng& rng);

/// Closed-form expected kernel change for the pair (k_idx, l_idx) of rows of X.
McEstimate expected_ntk_change(const LambdaVector& lambdas, const MatrixRef& X,
                               std::size_t k_idx, std::size_t l_idx,
                               Activation activation, std::size_t samples,
                               const Rng& rng);

/// Finite-difference-in-time oracle: (Theta(W_1) - Theta(W_0)) / lr after one
/// gradient step of size lr, averaged over fresh antithetic initializations.
McEstimate mc_ntk_change(const LambdaVector& lambdas, const MatrixRef& X,
                         const MatrixRef& Y, std::size_t k_idx, std::size_t l_idx,
                         Activation activation, std::size_t replications, double lr,
                         const Rng& rng);

/// C0(X) = sum_{i,i'} (x_i.x_i'/d)^2 Var(sigma'(w.x_i/sqrt d) sigma'(w.x_i'/sqrt d)).
/// The standard error comes from 100 batch means.
McEstimate ntg_variance_constant(const MatrixRef& X, Activation activation,
                                 std::size_t samples, const Rng& rng);

struct C1Estimate {
  McEstimate value;  // at the maximizing grid point
  double argmax_c = 1.0;
};

/// sup over c in {0.05, 0.10, ..., 1.00} of E[sigma(c z / sqrt d)^2], common
/// random numbers across the grid. Smooth activations only.
C1Estimate c1_constant(Activation activation, std::size_t d, std::size_t samples,
                       const Rng& rng);

/// Width requirement and bounds of the global convergence results: the ReLU
/// form for ReLU, the smooth form otherwise. gamma and kappa_n must be > 0.
BoundReport convergence_bounds(const TheoryParams& params, std::size_t n, std::size_t d,
                               double gamma, double kappa_n, const LambdaVector& lambdas,
                               Activation activation);

struct TheoryOptions {
  std::size_t kappa_samples = 200000;
  std::size_t c0_samples = 200000;
  std::size_t c1_samples = 200000;
  std::size_t g_samples = 200000;        // g1 / g2
  std::size_t mc_replications = 2000;    // fresh-network oracles
  double fd_learning_rate = 1e-4;
  double delta = 0.1;
  std::size_t max_table_rows = 8;        // (j, k) and (k, l) entries reported
  bool include_tables = true;
};

struct WeightChangeRow {
  std::size_t j = 0, k = 0;
  double analytic = 0.0, analytic_se = 0.0;
  double mc_mean = 0.0, mc_se = 0.0;
};

struct KernelChangeRow {
  std::size_t k = 0, l = 0;
  double analytic = 0.0, analytic_se = 0.0;
  double mc_mean = 0.0, mc_se = 0.0;
};

struct TheoryReport {
  std::size_t n = 0, d = 0, m = 0;
  double gamma = 1.0;
  Activation activation = Activation::kRelu;
  double kappa_n = 0.0;
  double kappa_half_width = 0.0;
  double departure_constant = 0.0;
  double tail_mass = 0.0;
  McEstimate C0;
  std::optional<McEstimate> C1;   // smooth activations only
  TheoryParams params;
  std::optional<BoundReport> bounds;  // requires gamma > 0 and kappa_n > 0
  std::vector<WeightChangeRow> weight_change_table;
  std::vector<KernelChangeRow> kernel_change_table;  // smooth activations only
};

TheoryReport build_theory_report(const MatrixRef& X, const MatrixRef& Y,
                                 const ScalingScheme& scheme, Activation activation,
                                 const TheoryOptions& options, const Rng& rng);

}  // namespace asymnet

#endif  // ASYMNET_THEORY_HPP
