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


#include <doctest.h>

#include <cmath>
#include <numbers>

#include "asymnet/dataset.hpp"
#include "asymnet/error.hpp"
#include "asymnet/theory.hpp"

using namespace asymnet;

namespace {

bool within(const McEstimate& a, const McEstimate& b, double k = 3.0) {
  return std::abs(a.mean - b.mean) <= k * std::hypot(a.se, b.se);
}

// Plain Monte Carlo mean with standard error.
template <class F>
McEstimate plain_mc(std::size_t samples, Rng gen, F&& f) {
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = f(gen);
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = s / n;
  return {mean, std::sqrt((s2 / n - mean * mean) / (n - 1.0)), samples};
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("g1 values") {
  const Eigen::VectorXd x = vec({0.6, -0.3, 0.2, 0.5});
  const double s = x.norm() / 2.0;
  const auto relu = g1(x, Activation::kRelu, 0, Rng(1));
  CHECK(relu.mean == doctest::Approx(s / std::sqrt(2 * std::numbers::pi)).epsilon(1e-15));
  CHECK(relu.se == 0.0);
  // sigma sigma' is odd for tanh and linear
  CHECK(g1(x, Activation::kTanh, 1000, Rng(1)).mean == 0.0);
  CHECK(g1(x, Activation::kLinear, 1000, Rng(1)).mean == 0.0);
  const auto soft = g1(x, Activation::kSoftplus, 200000, Rng(2));
  const auto oracle = plain_mc(4000000, Rng(3), [&](Rng& g) {
    const double z = s * g.normal();
    return activate(Activation::kSoftplus, z) * activate_d1(Activation::kSoftplus, z);
  });
  CHECK(within(soft, oracle));
  CHECK_THROWS_AS(g1(Eigen::VectorXd::Zero(4), Activation::kRelu, 10, Rng(1)), Error);
}

TEST_CASE("standard errors shrink like one over root samples") {
  const Eigen::VectorXd x = vec({0.6, -0.3, 0.2, 0.5});
  const auto a = g1(x, Activation::kSoftplus, 100000, Rng(4));
  const auto b = g1(x, Activation::kSoftplus, 200000, Rng(4));
  CHECK(b.se / a.se >= 0.8 / std::sqrt(2.0));
  CHECK(b.se / a.se <= 1.2 / std::sqrt(2.0));
  const Eigen::VectorXd y = vec({0.1, 0.7, -0.4, 0.2});
  const auto c = g2_mc(x, y, x, Activation::kTanh, 50000, Rng(5));
  const auto e = g2_mc(x, y, x, Activation::kTanh, 100000, Rng(5));
  CHECK(e.se / c.se >= 0.8 / std::sqrt(2.0));
  CHECK(e.se / c.se <= 1.2 / std::sqrt(2.0));
}

TEST_CASE("first-step weight change table") {
  const Dataset ds = synth_dataset(6, 3, 0.1, Rng(6));
  const auto l = compute_lambdas(ScalingScheme::explicit_weights(0.0, {0.7, 0.3}, 5));
  const auto t = expected_first_step_weight_changes(l, ds.X, Activation::kRelu, 0, Rng(7));
  CHECK(t.mean.bottomRows(3).isZero(0.0));
  CHECK(expected_first_step_weight_change(l, ds.X, Activation::kRelu, 1, 2) == t.mean(1, 2));
  // rows are proportional to lambda_j
  CHECK((t.mean.row(0) * 0.3 - t.mean.row(1) * 0.7).cwiseAbs().maxCoeff() < 1e-15);

  const auto mc = mc_first_step_weight_change(l, ds.X, ds.Y, Activation::kRelu, 200, Rng(8));
  CHECK(mc.mean.bottomRows(3).isZero(0.0));
  const Eigen::MatrixXd other_y = ds.Y.array() * 3.0 - 1.0;
  const auto mc2 = mc_first_step_weight_change(l, ds.X, other_y, Activation::kRelu, 200, Rng(8));
  CHECK((mc.mean - mc2.mean).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(mc_first_step_weight_change(l, ds.X, ds.Y, Activation::kRelu, 10, Rng(8)),
                  Error);
}

TEST_CASE("first-step weight change agrees with fresh networks") {
  const Dataset ds = synth_dataset(8, 4, 0.1, Rng(9));
  const auto l = compute_lambdas(ScalingScheme::zipf(0.0, 0.5, 8));
  for (Activation act : {Activation::kRelu, Activation::kSoftplus}) {
    const auto a = expected_first_step_weight_changes(l, ds.X, act, 200000, Rng(10));
    const auto b = mc_first_step_weight_change(l, ds.X, ds.Y, act, 2000, Rng(11));
    for (Eigen::Index j = 0; j < 8; ++j) {
      for (Eigen::Index k = 0; k < 4; ++k) {
        CHECK(std::abs(a.mean(j, k) - b.mean(j, k)) <= 3.0 * std::hypot(a.se(j, k), b.se(j, k)));
      }
    }
  }
}

TEST_CASE("g2 values") {
  const Eigen::VectorXd xk = vec({0.6, -0.3, 0.2, 0.5});
  const Eigen::VectorXd xl = vec({0.1, 0.7, -0.4, 0.2});
  const Eigen::VectorXd xi = vec({-0.5, 0.2, 0.3, 0.6});
  CHECK(g2_mc(xk, xl, xi, Activation::kLinear, 1000, Rng(1)).mean == 0.0);
  const auto est = g2_mc(xk, xl, xi, Activation::kTanh, 400000, Rng(12));
  // sample w directly instead of factoring the covariance
  const auto oracle = plain_mc(4000000, Rng(13), [&](Rng& g) {
    Eigen::VectorXd w(4);
    for (int k = 0; k < 4; ++k) w[k] = g.normal();
    const double z1 = w.dot(xk) / 2.0, z2 = w.dot(xl) / 2.0, z3 = w.dot(xi) / 2.0;
    return activate_d2(Activation::kTanh, z1) * activate_d1(Activation::kTanh, z2) *
           activate_d1(Activation::kTanh, z3) * activate(Activation::kTanh, z3);
  });
  CHECK(within(est, oracle));
  // collinear inputs give a singular covariance
  const auto col = g2_mc(xk, 2.0 * xk, xi, Activation::kTanh, 10000, Rng(14));
  CHECK(std::isfinite(col.mean));
  CHECK_THROWS_AS(g2_mc(xk, Eigen::VectorXd::Zero(4), xi, Activation::kTanh, 100, Rng(1)), Error);
}

TEST_CASE("expected kernel change") {
  Eigen::MatrixXd X(3, 2);
  X << 1.0, 0.0, 0.0, 1.0, 0.6, 0.8;
  const auto l = compute_lambdas(ScalingScheme::zipf(0.5, 0.5, 16));
  CHECK(expected_ntk_change(l, X, 0, 1, Activation::kTanh, 1000, Rng(1)).mean == 0.0);
  const auto small = compute_lambdas(ScalingScheme::zipf(1.0, 0.5, 16));
  const auto big = compute_lambdas(ScalingScheme::zipf(1.0, 0.5, 4096));
  const double a = expected_ntk_change(small, X, 0, 2, Activation::kTanh, 20000, Rng(2)).mean;
  const double b = expected_ntk_change(big, X, 0, 2, Activation::kTanh, 20000, Rng(2)).mean;
  CHECK(a / b == doctest::Approx(256.0).epsilon(1e-12));
  CHECK_THROWS_AS(expected_ntk_change(l, X, 0, 2, Activation::kRelu, 1000, Rng(1)), Error);
  CHECK_THROWS_AS(expected_ntk_change(l, X, 0, 3, Activation::kTanh, 1000, Rng(1)), Error);
}

TEST_CASE("expected kernel change agrees with a finite-difference step") {
  const Dataset ds = synth_dataset(5, 3, 0.1, Rng(15));
  const auto l = compute_lambdas(ScalingScheme::zipf(0.0, 0.5, 16));
  const auto a = expected_ntk_change(l, ds.X, 0, 1, Activation::kTanh, 200000, Rng(16));
  const auto b = mc_ntk_change(l, ds.X, ds.Y, 0, 1, Activation::kTanh, 2000, 1e-4, Rng(17));
  CHECK(within(a, b));
}

TEST_CASE("ntg variance constant") {
  Eigen::MatrixXd X(2, 4);
  X << 0.6, -0.3, 0.2, 0.5, 0.1, 0.7, -0.4, 0.2;
  CHECK(ntg_variance_constant(X, Activation::kLinear, 10000, Rng(1)).mean == 0.0);
  const Eigen::MatrixXd one = X.topRows(1) / X.row(0).norm();
  const auto c = ntg_variance_constant(one, Activation::kRelu, 100000, Rng(2));
  CHECK(std::abs(c.mean - 0.25 / 16.0) <= 3 * c.se + 1e-12);

  const auto est = ntg_variance_constant(X, Activation::kRelu, 1000000, Rng(3));
  // oracle: per pair variance of the indicator product from direct sampling
  const Eigen::MatrixXd inner = X * X.transpose() / 4.0;
  double total = 0.0, var_total = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      const double p = plain_mc(2000000, Rng(4, static_cast<std::uint64_t>(2 * i + k)), [&](Rng& g) {
        Eigen::VectorXd w(4);
        for (int q = 0; q < 4; ++q) w[q] = g.normal();
        return (w.dot(X.row(i)) > 0.0 && w.dot(X.row(k)) > 0.0) ? 1.0 : 0.0;
      }).mean;
      const double wgt = inner(i, k) * inner(i, k);
      total += wgt * p * (1.0 - p);
      // delta method on p(1-p)
      var_total += wgt * wgt * std::pow(1.0 - 2.0 * p, 2) * p * (1.0 - p) / 2e6;
    }
  }
  CHECK(std::abs(est.mean - total) <= 3.0 * std::sqrt(est.se * est.se + var_total) + 1e-9);
  CHECK_THROWS_AS(ntg_variance_constant(X, Activation::kRelu, 100, Rng(1)), Error);
}

TEST_CASE("c1 constant") {
  const auto lin = c1_constant(Activation::kLinear, 1, 200000, Rng(1));
  CHECK(lin.argmax_c == doctest::Approx(1.0));
  CHECK(std::abs(lin.value.mean - 1.0) <= 3 * lin.value.se);
  const auto th = c1_constant(Activation::kTanh, 1, 200000, Rng(2));
  CHECK(th.value.mean <= 1.0);
  const auto soft = c1_constant(Activation::kSoftplus, 4, 200000, Rng(3));
  CHECK(soft.argmax_c == doctest::Approx(1.0));
  const auto oracle = plain_mc(4000000, Rng(4), [](Rng& g) {
    const double v = activate(Activation::kSoftplus, g.normal() / 2.0);
    return v * v;
  });
  CHECK(within(soft.value, oracle));
  CHECK_THROWS_AS(c1_constant(Activation::kRelu, 4, 1000, Rng(1)), Error);
}

TEST_CASE("convergence bounds arithmetic") {
  const auto params = TheoryParams::make(1.0, Activation::kRelu, 0.0, 0.1, 10);
  CHECK(params.D0 == doctest::Approx(std::sqrt(2.2)));
  const auto l = compute_lambdas(ScalingScheme::zipf(1.0, 0.5, 64));
  const auto r = convergence_bounds(params, 20, 10, 1.0, 0.05, l, Activation::kRelu);
  CHECK(std::isfinite(r.width_required));
  CHECK(r.width_required > 1e6);
  CHECK(r.decay_rate == doctest::Approx(0.025));
  CHECK(r.weight_bound.size() == 64);
  CHECK(r.weight_bound[3] / r.weight_bound[0] == doctest::Approx(std::sqrt(l[3] / l[0])));
  const auto r2 = convergence_bounds(params, 40, 10, 1.0, 0.05, l, Activation::kRelu);
  const double want = 2.0 * std::log(8.0 * 20 / 0.1) / std::log(4.0 * 20 / 0.1);
  CHECK(r2.width_terms[0] / r.width_terms[0] == doctest::Approx(want).epsilon(1e-12));
  CHECK_THROWS_AS(convergence_bounds(params, 20, 10, 0.0, 0.05, l, Activation::kRelu), Error);
  CHECK_THROWS_AS(convergence_bounds(params, 20, 10, 1.0, 0.0, l, Activation::kRelu), Error);

  const auto smooth = TheoryParams::make(1.0, Activation::kTanh, 0.3, 0.1, 10);
  const auto rs = convergence_bounds(smooth, 20, 10, 0.5, 0.05, l, Activation::kTanh);
  CHECK_FALSE(rs.relu);
  CHECK(rs.ntg_bound > 0.0);
  CHECK_THROWS_AS(TheoryParams::make(1.0, Activation::kRelu, 0.0, 1.5, 10), Error);
}

TEST_CASE("theory report") {
  const Dataset ds = synth_dataset(6, 4, 0.1, Rng(20));
  TheoryOptions opts;
  opts.kappa_samples = 20000;
  opts.c0_samples = 20000;
  opts.c1_samples = 20000;
  opts.g_samples = 20000;
  opts.mc_replications = 200;
  opts.max_table_rows = 3;
  const auto rep = build_theory_report(ds.X, ds.Y, ScalingScheme::zipf(0.0, 0.5, 8),
                                       Activation::kRelu, opts, Rng(21));
  CHECK(rep.departure_constant == doctest::Approx(0.4).epsilon(1e-9));
  CHECK_FALSE(rep.bounds.has_value());
  CHECK_FALSE(rep.C1.has_value());
  CHECK(rep.weight_change_table.size() == 3);
  CHECK(rep.kernel_change_table.empty());
  const auto sm = build_theory_report(ds.X, ds.Y, ScalingScheme::zipf(0.5, 0.5, 8),
                                      Activation::kTanh, opts, Rng(21));
  CHECK(sm.C1.has_value());
  CHECK(sm.bounds.has_value());
  CHECK(sm.kernel_change_table.size() == 3);
  const auto again = build_theory_report(ds.X, ds.Y, ScalingScheme::zipf(0.5, 0.5, 8),
                                         Activation::kTanh, opts, Rng(21));
  CHECK(again.kappa_n == sm.kappa_n);
  CHECK(again.kernel_change_table[1].mc_mean == sm.kernel_change_table[1].mc_mean);
}
