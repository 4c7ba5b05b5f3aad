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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "asymnet/dataset.hpp"
#include "asymnet/error.hpp"
#include "asymnet/training.hpp"

using namespace asymnet;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index r, Eigen::Index c, Rng g) {
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index k = 0; k < c; ++k) M(i, k) = g.normal();
  }
  return M;
}

Eigen::MatrixXd fd_gradient(const Network& net, const LambdaVector& l, const Eigen::MatrixXd& X,
                            const Eigen::MatrixXd& Y, double h) {
  Eigen::MatrixXd G(net.W.rows(), net.W.cols());
  Network p = net;
  for (Eigen::Index j = 0; j < G.rows(); ++j) {
    for (Eigen::Index k = 0; k < G.cols(); ++k) {
      const double w = net.W(j, k);
      p.W(j, k) = w + h;
      const double up = loss(p, l, X, Y);
      p.W(j, k) = w - h;
      const double down = loss(p, l, X, Y);
      p.W(j, k) = w;
      G(j, k) = (up - down) / (2 * h);
    }
  }
  return G;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Network one_node(double w, Activation act) {
  Network net;
  net.d = 1;
  net.m = 1;
  net.W = Eigen::MatrixXd::Constant(1, 1, w);
  net.a = Eigen::MatrixXd::Ones(1, 1);
  net.activation = act;
  return net;
}

}  // namespace

TEST_CASE("loss examples") {
  const auto l1 = LambdaVector::from_values(Eigen::VectorXd::Ones(1));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1, 1);
  CHECK(loss(one_node(0.0, Activation::kRelu), l1, x, Eigen::MatrixXd::Constant(1, 1, 2.0)) == 2.0);

  const Dataset ds = synth_dataset(10, 4, 0.1, Rng(1));
  const Network net = init_network(4, 16, Activation::kTanh, Rng(2));
  const auto l = compute_lambdas(ScalingScheme::zipf(0.5, 0.5, 16));
  const Eigen::MatrixXd f = forward(net, l, ds.X);
  CHECK(loss(net, l, ds.X, f) == 0.0);
  CHECK(gradient(net, l, ds.X, f).isZero(0.0));
  const Eigen::MatrixXd y2 = f + 2.0 * (ds.Y - f);
  CHECK(loss(net, l, ds.X, y2) == doctest::Approx(4.0 * loss(net, l, ds.X, ds.Y)).epsilon(1e-12));
  CHECK_THROWS_AS(loss(net, l, ds.X, ds.Y.topRows(5)), Error);
}

TEST_CASE("gradient matches central differences for smooth activations") {
  for (Activation act : {Activation::kTanh, Activation::kSoftplus, Activation::kSigmoid,
                         Activation::kLinear}) {
    for (std::uint64_t inst = 0; inst < 20; ++inst) {
      Rng g(100 + inst, static_cast<std::uint64_t>(act));
      const Eigen::MatrixXd X = gaussian(6, 4, g.substream(0));
      const Eigen::MatrixXd Y = gaussian(6, 1, g.substream(1));
      const Network net = init_network(4, 8, act, g.substream(2));
      const auto l = compute_lambdas(ScalingScheme::zipf(g.substream(3).uniform(), 0.6, 8));
      const Eigen::MatrixXd G = gradient(net, l, X, Y);
      const Eigen::MatrixXd F = fd_gradient(net, l, X, Y, 1e-5);
      CHECK((G - F).norm() / F.norm() <= 1e-5);
    }
  }
}

TEST_CASE("zero lambda rows have zero gradient and never move") {
  const Dataset ds = synth_dataset(12, 5, 0.1, Rng(3));
  const auto l = compute_lambdas(ScalingScheme::explicit_weights(0.0, {0.5, 0.3, 0.2}, 10));
  const Network net = init_network(5, 10, Activation::kTanh, Rng(4));
  const Eigen::MatrixXd G = gradient(net, l, ds.X, ds.Y);
  CHECK(G.bottomRows(7).isZero(0.0));
  TrainConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.steps = 300;
  cfg.record_every = 50;
  const auto trace = train(net, l, ds.X, ds.Y, cfg);
  for (const auto& disp : trace.weight_displacements) {
    CHECK(disp.tail(7).isZero(0.0));
  }
  CHECK(trace.weight_displacements.back().head(3).minCoeff() > 0.0);
}

TEST_CASE("zero steps") {
  const Dataset ds = synth_dataset(8, 3, 0.1, Rng(5));
  const Network net = init_network(3, 4, Activation::kRelu, Rng(6));
  const auto l = compute_lambdas(ScalingScheme::zipf(1.0, 0.5, 4));
  TrainConfig cfg;
  cfg.steps = 0;
  const auto trace = train(net, l, ds.X, ds.Y, cfg);
  REQUIRE(trace.records() == 1);
  CHECK(trace.steps[0] == 0);
  CHECK(trace.losses[0] == loss(net, l, ds.X, ds.Y));
  CHECK(trace.weight_displacements[0].isZero(0.0));
  CHECK(trace.final_network.W == net.W);
  const auto summary = weight_displacements(trace);
  CHECK(summary.max[0] == 0.0);
}

TEST_CASE("one linear node by hand") {
  const auto l1 = LambdaVector::from_values(Eigen::VectorXd::Ones(1));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1, 1);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Ones(1, 1);
  TrainConfig cfg;
  cfg.steps = 1;
  cfg.record_every = 1;
  const auto trace = train(one_node(0.0, Activation::kLinear), l1, x, y, cfg);
  CHECK(trace.final_network.W(0, 0) == 1.0);
  CHECK(trace.losses.back() == 0.0);
  CHECK(trace.losses.front() == 0.5);

  // w <- w + lr (y - w): from w0 = 0.25 with lr 0.5 and y = 3
  cfg.learning_rate = 0.5;
  cfg.steps = 3;
  const auto t2 = train(one_node(0.25, Activation::kLinear), l1, x, 3.0 * y, cfg);
  double w = 0.25;
  for (int s = 0; s < 3; ++s) w += 0.5 * (3.0 - w);
  CHECK(t2.final_network.W(0, 0) == doctest::Approx(w).epsilon(1e-15));
  CHECK(t2.records() == 4);
}

TEST_CASE("symmetric scaling descends monotonically") {
  const Dataset ds = synth_dataset(20, 10, 0.1, Rng(7));
  const Network net = init_network(10, 1024, Activation::kRelu, Rng(8));
  const auto l = compute_lambdas(ScalingScheme::zipf(1.0, 0.5, 1024));
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.steps = 2000;
  cfg.record_every = 50;
  const auto trace = train(net, l, ds.X, ds.Y, cfg);
  for (std::size_t i = 1; i < trace.records(); ++i) {
    CHECK(trace.losses[i] < trace.losses[i - 1]);
  }
}

TEST_CASE("small learning rate is a descent method") {
  const Dataset ds = synth_dataset(20, 10, 0.1, Rng(9));
  const Network net = init_network(10, 64, Activation::kTanh, Rng(10));
  const auto l = compute_lambdas(ScalingScheme::zipf(0.5, 0.5, 64));
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.steps = 500;
  cfg.record_every = 1;
  const auto trace = train(net, l, ds.X, ds.Y, cfg);
  for (std::size_t i = 1; i < trace.records(); ++i) {
    CHECK(trace.losses[i] <= trace.losses[i - 1] + 1e-12);
  }
}

TEST_CASE("halved step with doubled steps lands close") {
  const Dataset ds = synth_dataset(20, 10, 0.1, Rng(11));
  const Network net = init_network(10, 128, Activation::kTanh, Rng(12));
  const auto l = compute_lambdas(ScalingScheme::zipf(0.5, 0.5, 128));
  TrainConfig a;
  a.learning_rate = 0.2;
  a.steps = 1000;
  a.record_every = 1000;
  a.loss_floor = 0.0;
  TrainConfig b = a;
  b.learning_rate = 0.1;
  b.steps = 2000;
  b.record_every = 2000;
  const double la = train(net, l, ds.X, ds.Y, a).losses.back();
  const double lb = train(net, l, ds.X, ds.Y, b).losses.back();
  CHECK(std::abs(la - lb) <= 0.05 * lb);
}

namespace {

double displacement_rank_correlation(Activation act, std::uint64_t seed) {
  const std::size_t m = 512;
  const Rng base(seed);
  const Dataset ds = synth_dataset(20, 10, 0.1, base.substream(1));
  const Network net = init_network(10, m, act, base.substream(3));
  const auto l = compute_lambdas(ScalingScheme::zipf(0.0, 0.4, m));
  TrainConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.steps = 2000;
  cfg.record_every = 2000;
  const auto trace = train(net, l, ds.X, ds.Y, cfg);
  const Eigen::VectorXd& disp = trace.weight_displacements.back();
  std::vector<double> dv, rl;
  double lo = INFINITY, hi = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    if (l[j] <= 1e-8) continue;
    dv.push_back(disp[static_cast<Eigen::Index>(j)]);
    rl.push_back(std::sqrt(l[j]));
    const double ratio = dv.back() / rl.back();
    if (ratio > 0.0) lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const double rho = spearman(dv, rl);
  MESSAGE(to_string(act) << " seed " << seed << ": rho " << rho
                         << ", displacement / sqrt(lambda) spread " << hi / lo);
  return rho;
}

}  // namespace

// A ReLU node that is inactive on most inputs moves little whatever its
// lambda, so single ReLU runs are noisy; the median over seeds is checked.
TEST_CASE("displacement follows sqrt lambda under asymmetric scaling") {
  std::vector<double> relu;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    relu.push_back(displacement_rank_correlation(Activation::kRelu, seed));
    CHECK(displacement_rank_correlation(Activation::kTanh, seed) >= 0.9);
  }
  std::sort(relu.begin(), relu.end());
  CHECK(relu[2] >= 0.9);
}

TEST_CASE("divergence names the step") {
  const Dataset ds = synth_dataset(10, 4, 0.1, Rng(15));
  const Network net = init_network(4, 16, Activation::kRelu, Rng(16));
  const auto l = compute_lambdas(ScalingScheme::zipf(1.0, 0.5, 16));
  TrainConfig cfg;
  cfg.learning_rate = 1e6;
  cfg.steps = 100000;
  cfg.record_every = 100000;
  try {
    train(net, l, ds.X, ds.Y, cfg);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.kind() == ErrorKind::kDivergence);
    CHECK(e.step() > 0);
    CHECK(std::string(e.what()).find(std::to_string(e.step())) != std::string::npos);
  }
}

TEST_CASE("early stop at the loss floor") {
  const auto l1 = LambdaVector::from_values(Eigen::VectorXd::Ones(1));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1, 1);
  TrainConfig cfg;
  cfg.steps = 100;
  cfg.record_every = 10;
  const auto trace = train(one_node(0.0, Activation::kLinear), l1, x, x, cfg);
  CHECK(trace.early_stopped);
  CHECK(trace.last_step == 1);
  CHECK(trace.steps.back() == 1);
}

TEST_CASE("minibatch runs are reproducible") {
  const Dataset ds = synth_dataset(30, 5, 0.1, Rng(17));
  const Network net = init_network(5, 32, Activation::kTanh, Rng(18));
  const auto l = compute_lambdas(ScalingScheme::zipf(0.5, 0.5, 32));
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.steps = 200;
  cfg.record_every = 50;
  cfg.batch_size = 8;
  cfg.batch_seed = 3;
  const auto a = train(net, l, ds.X, ds.Y, cfg);
  const auto b = train(net, l, ds.X, ds.Y, cfg);
  CHECK(a.final_network.W == b.final_network.W);
  CHECK(a.losses == b.losses);
  cfg.batch_seed = 4;
  const auto c = train(net, l, ds.X, ds.Y, cfg);
  CHECK(c.final_network.W != a.final_network.W);
  CHECK(c.losses.back() < c.losses.front());
}

TEST_CASE("ntg tracking along the path") {
  const Dataset ds = synth_dataset(10, 5, 0.1, Rng(19));
  const Network net = init_network(5, 64, Activation::kRelu, Rng(20));
  const auto l = compute_lambdas(ScalingScheme::zipf(0.5, 0.5, 64));
  TrainConfig cfg;
  cfg.steps = 100;
  cfg.record_every = 25;
  cfg.track_ntg = true;
  cfg.keep_ntg_snapshots = true;
  const auto trace = train(net, l, ds.X, ds.Y, cfg);
  REQUIRE(trace.min_eigs.size() == trace.records());
  CHECK(trace.ntg_changes[0] == 0.0);
  CHECK(trace.ntg_snapshots.size() == trace.records());
  const auto last = ntg(trace.final_network, l, ds.X);
  CHECK((last.values - trace.ntg_snapshots.back().ntg.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.record_every = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.steps = 10;
  cfg.record_every = 20;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
