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

#include "asymnet/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "asymnet/error.hpp"

namespace asymnet {

namespace {

// (X X^T / d) o (S diag(weights) S^T)
Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& inner, const Eigen::MatrixXd& S,
                              const Eigen::VectorXd& weights) {
  const Eigen::MatrixXd SW = S * weights.asDiagonal();
  const Eigen::MatrixXd R = inner.cwiseProduct(SW * S.transpose());
  // GEMM rounding can break exact symmetry in the last bit.
  return 0.5 * (R + R.transpose());
}

constexpr std::size_t kMcChunk = 4096;

}  // namespace

double ntk(const Network& net, const LambdaVector& lambdas, const VectorRef& x,
           const VectorRef& xp) {
  require(static_cast<std::size_t>(x.size()) == net.d &&
              static_cast<std::size_t>(xp.size()) == net.d,
          ErrorKind::kShape, "ntk inputs must have dimension d");
  require(lambdas.size() == net.m, ErrorKind::kShape, "lambda vector length must be m");
  const double rd = std::sqrt(static_cast<double>(net.d));
  const Eigen::VectorXd z = net.W * x / rd;
  const Eigen::VectorXd zp = net.W * xp / rd;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    acc += lambdas.values[j] * activate_d1(net.activation, z[j]) *
           activate_d1(net.activation, zp[j]);
  }
  return x.dot(xp) / static_cast<double>(net.d) * acc;
}

NTGMatrix ntg(const Network& net, const LambdaVector& lambdas, const MatrixRef& X) {
  check_shapes(net, lambdas, X);
  require(X.rows() >= 1, ErrorKind::kShape, "ntg needs at least one input");
  const Eigen::MatrixXd S = apply_activation_d1(net.activation, preactivations(net, X));
  const Eigen::MatrixXd inner = X * X.transpose() / static_cast<double>(net.d);
  NTGMatrix out;
  out.part1 = weighted_gram(inner, S, lambdas.gamma_part);
  out.part2 = weighted_gram(inner, S, lambdas.asym_part);
  out.values = out.part1 + out.part2;
  return out;
}

Eigen::MatrixXd ntg_values(const Network& net, const LambdaVector& lambdas,
                           const MatrixRef& X) {
  check_shapes(net, lambdas, X);
  const Eigen::MatrixXd S = apply_activation_d1(net.activation, preactivations(net, X));
  const Eigen::MatrixXd inner = X * X.transpose() / static_cast<double>(net.d);
  return weighted_gram(inner, S, lambdas.values);
}

MeanKernelEstimate mean_ntg_mc(const MatrixRef& X, Activation activation,
                               std::size_t samples, const Rng& rng) {
  require(samples >= 100, ErrorKind::kDomain, "mean_ntg_mc needs at least 100 samples");
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const double rd = std::sqrt(static_cast<double>(d));
  Eigen::MatrixXd first = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  Rng gen = rng.substream(0);

  for (std::size_t done = 0; done < samples; done += kMcChunk) {
    const auto b = static_cast<Eigen::Index>(std::min(kMcChunk, samples - done));
    Eigen::MatrixXd Wc(b, d);
    for (Eigen::Index r = 0; r < b; ++r) {
      for (Eigen::Index k = 0; k < d; ++k) Wc(r, k) = gen.normal();
    }
    // b x n matrix of sigma'(w_r . x_i / sqrt d)
    const Eigen::MatrixXd S = apply_activation_d1(activation, Wc * X.transpose() / rd);
    const Eigen::MatrixXd S2 = S.cwiseProduct(S);
    first.noalias() += S.transpose() * S;
    second.noalias() += S2.transpose() * S2;
  }

  const double ns = static_cast<double>(samples);
  const Eigen::MatrixXd inner = X * X.transpose() / static_cast<double>(d);
  const Eigen::MatrixXd mean_prod = first / ns;
  Eigen::MatrixXd var = (second / ns - mean_prod.cwiseProduct(mean_prod)) * (ns / (ns - 1.0));
  var = var.cwiseMax(0.0);

  MeanKernelEstimate out;
  out.samples = samples;
  out.mean = inner.cwiseProduct(mean_prod);
  out.standard_error = inner.cwiseAbs().cwiseProduct((var / ns).cwiseSqrt());
  return out;
}

KappaEstimate kappa_n(const MatrixRef& X, Activation activation, std::size_t samples,
                      const Rng& rng) {
  const MeanKernelEstimate est = mean_ntg_mc(X, activation, samples, rng);
  KappaEstimate out;
  out.value = min_eigenvalue(est.mean);
  out.half_width = static_cast<double>(X.rows()) * est.standard_error.maxCoeff();
  out.near_singular = out.value < 1e-8;
  return out;
}

double ntg_distance(const Eigen::Ref<const Eigen::MatrixXd>& A,
                    const Eigen::Ref<const Eigen::MatrixXd>& B) {
  require(A.rows() == B.rows() && A.cols() == B.cols(), ErrorKind::kShape,
          "ntg_distance needs matrices of equal size");
  return spectral_norm_symmetric(A - B);
}

double ntg_distance(const NTGMatrix& A, const NTGMatrix& B) {
  return ntg_distance(A.values, B.values);
}

}  // namespace asymnet
