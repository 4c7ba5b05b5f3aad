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

#include "asymnet/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "asymnet/eigensolver.hpp"
#include "asymnet/error.hpp"
#include "asymnet/kernel.hpp"
#include "asymnet/training.hpp"

namespace asymnet {

namespace {

// Running mean / variance (Welford), scalar or elementwise over a matrix.
struct Welford {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  McEstimate estimate() const {
    McEstimate e;
    e.mean = mean;
    e.samples = count;
    e.se = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) /
                                 static_cast<double>(count))
                     : 0.0;
    return e;
  }
};

struct MatrixWelford {
  std::size_t count = 0;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd m2;

  void add(const Eigen::MatrixXd& v) {
    if (count == 0) {
      mean = Eigen::MatrixXd::Zero(v.rows(), v.cols());
      m2 = Eigen::MatrixXd::Zero(v.rows(), v.cols());
    }
    ++count;
    const Eigen::MatrixXd delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta.cwiseProduct(v - mean);
  }
  WeightChangeTable table() const {
    WeightChangeTable t;
    t.mean = mean;
    const double c = static_cast<double>(count);
    t.se = count > 1 ? (m2 / (c - 1.0) / c).cwiseSqrt().eval()
                     : Eigen::MatrixXd::Zero(mean.rows(), mean.cols()).eval();
    return t;
  }
};

void require_nonzero(const VectorRef& x, const char* what) {
  if (x.norm() == 0.0) fail(ErrorKind::kDomain, std::string(what) + " must be a nonzero vector");
}

Eigen::MatrixXd first_column_targets(const MatrixRef& Y) { return Y.col(0); }

}  // namespace

TheoryParams TheoryParams::make(double C, Activation activation, double C1, double delta,
                                std::size_t d) {
  TheoryParams p;
  p.C = C;
  p.M = second_derivative_bound(activation);
  p.C1 = C1;
  p.delta = delta;
  p.D0 = std::sqrt(2.0 * C * C + 2.0 / static_cast<double>(d));
  p.validate();
  return p;
}

void TheoryParams::validate() const {
  require(delta > 0.0 && delta < 1.0, ErrorKind::kDomain, "delta must lie in (0, 1)");
  require(C >= 0.0 && M >= 0.0 && C1 >= 0.0 && D0 >= 0.0, ErrorKind::kDomain,
          "theory constants must be nonnegative");
}

McEstimate g1(const VectorRef& x, Activation activation, std::size_t samples,
              const Rng& rng) {
  require_nonzero(x, "g1 input");
  const double s = x.norm() / std::sqrt(static_cast<double>(x.size()));
  if (activation == Activation::kRelu) {
    return {s / std::sqrt(2.0 * std::numbers::pi), 0.0, 0};
  }
  require(samples >= 2, ErrorKind::kDomain, "g1 needs at least 2 samples");
  auto h = [&](double u) { return activate(activation, u) * activate_d1(activation, u); };
  Rng gen = rng.substream(0);
  Welford acc;
  for (std::size_t p = 0; p < samples / 2; ++p) {
    const double z = gen.normal();
    acc.add(0.5 * (h(s * z) + h(-s * z)));
  }
  McEstimate e = acc.estimate();
  e.samples = 2 * acc.count;
  return e;
}

WeightChangeTable expected_first_step_weight_changes(const LambdaVector& lambdas,
                                                     const MatrixRef& X,
                                                     Activation activation,
                                                     std::size_t samples, const Rng& rng) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Eigen::VectorXd g(n), gse(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const McEstimate e = g1(X.row(i).transpose(), activation, samples,
                            rng.substream(static_cast<std::uint64_t>(i)));
    g[i] = e.mean;
    gse[i] = e.se;
  }
  const double rd = std::sqrt(static_cast<double>(d));
  // per-coordinate sums over the data, then scale by -lambda_j / sqrt(d)
  const Eigen::RowVectorXd col = g.transpose() * X;
  const Eigen::RowVectorXd col_se =
      (gse.cwiseProduct(gse).transpose() * X.cwiseProduct(X)).cwiseSqrt();
  WeightChangeTable t;
  t.mean = -(lambdas.values / rd) * col;
  t.se = (lambdas.values / rd) * col_se;
  return t;
}

double expected_first_step_weight_change(const LambdaVector& lambdas, const MatrixRef& X,
                                         Activation activation, std::size_t j,
                                         std::size_t k, std::size_t samples,
                                         const Rng& rng) {
  require(j < lambdas.size() && static_cast<Eigen::Index>(k) < X.cols(), ErrorKind::kDomain,
          "node or coordinate index out of range");
  const auto t = expected_first_step_weight_changes(lambdas, X, activation, samples, rng);
  return t.mean(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
}

WeightChangeTable mc_first_step_weight_change(const LambdaVector& lambdas,
                                              const MatrixRef& X, const MatrixRef& Y,
                                              Activation activation,
                                              std::size_t replications, const Rng& rng) {
  require(replications >= 100, ErrorKind::kDomain, "need at least 100 replications");
  const auto d = static_cast<std::size_t>(X.cols());
  const Eigen::MatrixXd y = first_column_targets(Y);
  MatrixWelford acc;
  for (std::size_t r = 0; r < replications; ++r) {
    Network net = init_network(d, lambdas.size(), activation, rng.substream(r));
    const Eigen::MatrixXd plus = gradient(net, lambdas, X, y);
    net.a = -net.a;
    const Eigen::MatrixXd minus = gradient(net, lambdas, X, y);
    // dW/dt = -gradient
    acc.add(-0.5 * (plus + minus));
  }
  return acc.table();
}

McEstimate g2_mc(const VectorRef& xk, const VectorRef& xl, const VectorRef& xi,
                 Activation activation, std::size_t samples, const Rng& rng) {
  require_nonzero(xk, "g2 input x_k");
  require_nonzero(xl, "g2 input x_l");
  require_nonzero(xi, "g2 input x_i");
  require(xk.size() == xl.size() && xk.size() == xi.size(), ErrorKind::kShape,
          "g2 inputs must share a dimension");
  require(samples >= 2, ErrorKind::kDomain, "g2 needs at least 2 samples");
  const Eigen::Index d = xk.size();
  Eigen::MatrixXd G(d, 3);
  G.col(0) = xk;
  G.col(1) = xl;
  G.col(2) = xi;
  const Eigen::Matrix3d sigma = (G.transpose() * G) / static_cast<double>(d);
  const SymmetricEigen eig = jacobi_eigen(sigma, true);
  const Eigen::Vector3d root = eig.values.cwiseMax(1e-12).cwiseSqrt();
  const Eigen::Matrix3d L = eig.vectors * root.asDiagonal();

  Rng gen = rng.substream(0);
  Welford acc;
  for (std::size_t s = 0; s < samples; ++s) {
    const Eigen::Vector3d xi3(gen.normal(), gen.normal(), gen.normal());
    const Eigen::Vector3d z = L * xi3;
    acc.add(activate_d2(activation, z[0]) * activate_d1(activation, z[1]) *
            activate_d1(activation, z[2]) * activate(activation, z[2]));
  }
  return acc.estimate();
}

McEstimate expected_ntk_change(const LambdaVector& lambdas, const MatrixRef& X,
                               std::size_t k_idx, std::size_t l_idx,
                               Activation activation, std::size_t samples,
                               const Rng& rng) {
  const Eigen::Index n = X.rows();
  require(static_cast<Eigen::Index>(k_idx) < n && static_cast<Eigen::Index>(l_idx) < n,
          ErrorKind::kDomain, "kernel entry index out of range");
  require(is_smooth(activation), ErrorKind::kDomain,
          "expected kernel change needs a smooth activation");
  const double d = static_cast<double>(X.cols());
  const Eigen::VectorXd xk = X.row(static_cast<Eigen::Index>(k_idx)).transpose();
  const Eigen::VectorXd xl = X.row(static_cast<Eigen::Index>(l_idx)).transpose();
  // d^2: one 1/d from the kernel, 1/sqrt(d) from dz/dw and 1/sqrt(d) from the flow.
  const double coef = -xk.dot(xl) / (d * d) * power_sum(lambdas, 2.0);

  double total = 0.0;
  double var = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = X.row(i).transpose();
    const auto base = 2 * static_cast<std::uint64_t>(i);
    const McEstimate a = g2_mc(xk, xl, xi, activation, samples, rng.substream(base));
    const McEstimate b = g2_mc(xl, xk, xi, activation, samples, rng.substream(base + 1));
    const double ca = xk.dot(xi);
    const double cb = xl.dot(xi);
    total += ca * a.mean + cb * b.mean;
    var += ca * ca * a.se * a.se + cb * cb * b.se * b.se;
  }
  return {coef * total, std::abs(coef) * std::sqrt(var), samples};
}

McEstimate mc_ntk_change(const LambdaVector& lambdas, const MatrixRef& X,
                         const MatrixRef& Y, std::size_t k_idx, std::size_t l_idx,
                         Activation activation, std::size_t replications, double lr,
                         const Rng& rng) {
  require(replications >= 100, ErrorKind::kDomain, "need at least 100 replications");
  require(lr > 0.0, ErrorKind::kDomain, "finite-difference step must be positive");
  const Eigen::Index n = X.rows();
  require(static_cast<Eigen::Index>(k_idx) < n && static_cast<Eigen::Index>(l_idx) < n,
          ErrorKind::kDomain, "kernel entry index out of range");
  const auto d = static_cast<std::size_t>(X.cols());
  const Eigen::MatrixXd y = first_column_targets(Y);
  const Eigen::VectorXd xk = X.row(static_cast<Eigen::Index>(k_idx)).transpose();
  const Eigen::VectorXd xl = X.row(static_cast<Eigen::Index>(l_idx)).transpose();

  Welford acc;
  for (std::size_t r = 0; r < replications; ++r) {
    Network net = init_network(d, lambdas.size(), activation, rng.substream(r));
    const double theta0 = ntk(net, lambdas, xk, xl);
    double pair = 0.0;
    for (int side = 0; side < 2; ++side) {
      Network step = net;
      if (side == 1) step.a = -net.a;
      step.W -= lr * gradient(step, lambdas, X, y);
      pair += 0.5 * (ntk(step, lambdas, xk, xl) - theta0) / lr;
    }
    acc.add(pair);
  }
  return acc.estimate();
}

McEstimate ntg_variance_constant(const MatrixRef& X, Activation activation,
                                 std::size_t samples, const Rng& rng) {
  require(samples >= 10000, ErrorKind::kDomain, "C0 estimate needs at least 1e4 samples");
  constexpr std::size_t kBatches = 100;
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const double rd = std::sqrt(static_cast<double>(d));
  const Eigen::MatrixXd inner = X * X.transpose() / static_cast<double>(d);
  const Eigen::MatrixXd weight = inner.cwiseProduct(inner);

  auto c0_from = [&](const Eigen::MatrixXd& first, const Eigen::MatrixXd& second,
                     double count) {
    const Eigen::MatrixXd mean = first / count;
    const Eigen::MatrixXd var =
        ((second / count - mean.cwiseProduct(mean)) * (count / (count - 1.0))).cwiseMax(0.0);
    return weight.cwiseProduct(var).sum();
  };

  Eigen::MatrixXd first_total = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd second_total = Eigen::MatrixXd::Zero(n, n);
  Welford batch_stats;
  const std::size_t per_batch = samples / kBatches;
  for (std::size_t b = 0; b < kBatches; ++b) {
    const std::size_t count = b + 1 == kBatches ? samples - per_batch * (kBatches - 1) : per_batch;
    Rng gen = rng.substream(b);
    Eigen::MatrixXd Wc(static_cast<Eigen::Index>(count), d);
    for (Eigen::Index r = 0; r < Wc.rows(); ++r) {
      for (Eigen::Index k = 0; k < d; ++k) Wc(r, k) = gen.normal();
    }
    const Eigen::MatrixXd S = apply_activation_d1(activation, Wc * X.transpose() / rd);
    const Eigen::MatrixXd S2 = S.cwiseProduct(S);
    const Eigen::MatrixXd first = S.transpose() * S;
    const Eigen::MatrixXd second = S2.transpose() * S2;
    first_total += first;
    second_total += second;
    batch_stats.add(c0_from(first, second, static_cast<double>(count)));
  }
  McEstimate out;
  out.mean = c0_from(first_total, second_total, static_cast<double>(samples));
  out.se = batch_stats.estimate().se;
  out.samples = samples;
  return out;
}

C1Estimate c1_constant(Activation activation, std::size_t d, std::size_t samples,
                       const Rng& rng) {
  require(is_smooth(activation), ErrorKind::kDomain, "C1 is defined for smooth activations");
  require(d >= 1 && samples >= 2, ErrorKind::kDomain, "c1_constant needs d >= 1, samples >= 2");
  constexpr int kGrid = 20;
  const double rd = std::sqrt(static_cast<double>(d));
  std::array<Welford, kGrid> acc{};
  Rng gen = rng.substream(0);
  for (std::size_t s = 0; s < samples; ++s) {
    const double z = gen.normal();
    for (int g = 0; g < kGrid; ++g) {
      const double c = 0.05 * (g + 1);
      const double v = activate(activation, c * z / rd);
      acc[static_cast<std::size_t>(g)].add(v * v);
    }
  }
  C1Estimate out;
  int best = 0;
  for (int g = 1; g < kGrid; ++g) {
    if (acc[static_cast<std::size_t>(g)].mean > acc[static_cast<std::size_t>(best)].mean) best = g;
  }
  out.value = acc[static_cast<std::size_t>(best)].estimate();
  out.argmax_c = 0.05 * (best + 1);
  return out;
}

BoundReport convergence_bounds(const TheoryParams& params, std::size_t n, std::size_t d,
                               double gamma, double kappa_n, const LambdaVector& lambdas,
                               Activation activation) {
  params.validate();
  require(gamma > 0.0, ErrorKind::kDomain, "bound requires gamma > 0");
  require(kappa_n > 0.0, ErrorKind::kDomain, "bound requires kappa_n > 0");
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const double k = kappa_n;
  const double g = gamma;
  const double dl = params.delta;
  BoundReport r;
  r.relu = activation == Activation::kRelu;
  r.decay_rate = g * k / 2.0;
  const Eigen::VectorXd root = lambdas.values.cwiseSqrt();

  if (r.relu) {
    const double D0 = params.D0;
    r.width_terms[0] = std::pow(2.0, 3) * nn * std::log(4.0 * nn / dl) / (k * dd);
    r.width_terms[1] = std::pow(2.0, 25) * std::pow(nn, 4) * D0 * D0 /
                       (std::pow(k, 4) * std::pow(dd, 3) * g * g * std::pow(dl, 5));
    r.width_terms[2] = std::pow(2.0, 35) * std::pow(nn, 6) * D0 * D0 /
                       (std::pow(k, 6) * std::pow(dd, 5) * g * g * std::pow(dl, 5));
    r.weight_bound = (std::pow(2.0, 3) * nn * D0 / (k * std::sqrt(dd) * g * std::sqrt(dl))) * root;
    const double p = power_sum(lambdas, 1.5);
    r.ntg_bound = std::pow(2.0, 9) * nn * nn * D0 / (k * std::pow(dd, 1.5) * g * std::pow(dl, 2.5)) * p +
                  std::pow(2.0, 6) * std::pow(nn, 1.5) * std::sqrt(D0) /
                      (std::sqrt(k) * std::pow(dd, 1.25) * std::sqrt(g) * std::pow(dl, 1.25)) *
                      std::sqrt(p);
  } else {
    const double M = params.M;
    const double cc = params.C * params.C + params.C1;
    r.width_terms[0] = std::pow(2.0, 3) * nn * std::log(2.0 * nn / dl) / (k * dd);
    r.width_terms[1] = std::pow(2.0, 10) * std::pow(nn, 3) * M * M * cc /
                       (std::pow(k, 3) * std::pow(dd, 3) * g * g * dl);
    r.width_terms[2] = std::pow(2.0, 15) * std::pow(nn, 4) * M * M * cc /
                       (std::pow(k, 4) * std::pow(dd, 4) * g * g * dl);
    r.weight_bound = (nn / (k * std::sqrt(dd)) * std::sqrt(std::pow(2.0, 7) * cc / (g * g * dl))) * root;
    const double q = power_sum(lambdas, 2.0);
    r.ntg_bound = std::pow(2.0, 7) * std::pow(nn, 3) * M * M * cc /
                      (k * k * std::pow(dd, 3) * g * g * dl) * q +
                  std::pow(2.0, 5) * nn * nn * M * std::sqrt(cc) /
                      (k * dd * dd * g * std::sqrt(dl)) * std::sqrt(q);
  }
  r.width_required = *std::max_element(r.width_terms.begin(), r.width_terms.end());
  return r;
}

TheoryReport build_theory_report(const MatrixRef& X, const MatrixRef& Y,
                                 const ScalingScheme& scheme, Activation activation,
                                 const TheoryOptions& options, const Rng& rng) {
  scheme.validate();
  require(X.rows() == Y.rows(), ErrorKind::kShape, "X and Y row counts differ");
  TheoryReport rep;
  rep.n = static_cast<std::size_t>(X.rows());
  rep.d = static_cast<std::size_t>(X.cols());
  rep.m = scheme.m;
  rep.gamma = scheme.gamma;
  rep.activation = activation;
  const LambdaVector lambdas = compute_lambdas(scheme);

  const KappaEstimate kappa = kappa_n(X, activation, options.kappa_samples, rng.substream(1));
  rep.kappa_n = kappa.value;
  rep.kappa_half_width = kappa.half_width;
  rep.departure_constant = departure_constant(scheme);
  rep.tail_mass = tail_mass(scheme);
  rep.C0 = ntg_variance_constant(X, activation, options.c0_samples, rng.substream(2));
  double c1 = 0.0;
  if (is_smooth(activation)) {
    rep.C1 = c1_constant(activation, rep.d, options.c1_samples, rng.substream(3)).value;
    c1 = rep.C1->mean;
  }
  rep.params = TheoryParams::make(Y.cwiseAbs().maxCoeff(), activation, c1, options.delta, rep.d);
  if (scheme.gamma > 0.0 && kappa.value > 0.0) {
    rep.bounds = convergence_bounds(rep.params, rep.n, rep.d, scheme.gamma, kappa.value,
                                    lambdas, activation);
  }
  if (!options.include_tables) return rep;

  const auto analytic = expected_first_step_weight_changes(lambdas, X, activation,
                                                           options.g_samples, rng.substream(4));
  const auto mc = mc_first_step_weight_change(lambdas, X, Y, activation,
                                              options.mc_replications, rng.substream(5));
  const std::size_t rows = std::min(options.max_table_rows, scheme.m);
  for (std::size_t j = 0; j < rows; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const auto kk = static_cast<Eigen::Index>(j % rep.d);
    rep.weight_change_table.push_back({j, static_cast<std::size_t>(kk), analytic.mean(jj, kk),
                                       analytic.se(jj, kk), mc.mean(jj, kk), mc.se(jj, kk)});
  }
  if (is_smooth(activation) && rep.n >= 2) {
    std::size_t emitted = 0;
    for (std::size_t k = 0; k < rep.n && emitted < rows; ++k) {
      for (std::size_t l = k + 1; l < rep.n && emitted < rows; ++l, ++emitted) {
        const auto tag = 16 + 2 * emitted;
        const McEstimate a = expected_ntk_change(lambdas, X, k, l, activation,
                                                 options.g_samples, rng.substream(tag));
        const McEstimate b = mc_ntk_change(lambdas, X, Y, k, l, activation,
                                           options.mc_replications, options.fd_learning_rate,
                                           rng.substream(tag + 1));
        rep.kernel_change_table.push_back({k, l, a.mean, a.se, b.mean, b.se});
      }
    }
  }
  return rep;
}

}  // namespace asymnet
