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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "asymnet/dataset.hpp"
#include "asymnet/error.hpp"
#include "asymnet/experiments.hpp"
#include "asymnet/kernel.hpp"
#include "asymnet/scaling.hpp"
#include "asymnet/theory.hpp"
#include "asymnet/training.hpp"

using namespace asymnet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Eigen::MatrixXd gaussian(Eigen::Index r, Eigen::Index c, Rng g) {
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index k = 0; k < c; ++k) M(i, k) = g.normal();
  }
  return M;
}

// 1
Outcome scaling_identities() {
  Rng g(2024);
  double worst_sum = 0.0;
  int bound_failures = 0;
  for (int i = 0; i < 100; ++i) {
    const double gamma = g.uniform();
    const double alpha = 0.05 + 0.94 * g.uniform();
    const std::size_t m = 1 + g.below(5000);
    const auto l = compute_lambdas(ScalingScheme::zipf(gamma, alpha, m));
    worst_sum = std::max(worst_sum, std::abs(l.values.sum() - 1.0));
    const double s = l.values.cwiseSqrt().sum();
    const double md = static_cast<double>(m);
    const double tol = 1e-12 * std::sqrt(md);
    if (s < std::sqrt(gamma * md) - tol || s > std::sqrt(md) + tol) ++bound_failures;
  }
  return {worst_sum <= 1e-12 && bound_failures == 0,
          "max |sum - 1| = " + fmt("%.2e", worst_sum) + ", bound failures " +
              std::to_string(bound_failures) + "/100"};
}

// 2
Outcome departure_constant_check() {
  const double c = departure_constant(ScalingScheme::zipf(0.0, 0.5, 1024));
  bool monotone = true;
  double prev = INFINITY;
  std::string curve;
  for (int i = 1; i <= 9; ++i) {
    const double v = departure_constant(ScalingScheme::zipf(0.0, 0.1 * i, 1024));
    monotone = monotone && v <= prev;
    prev = v;
    curve += (i > 1 ? " " : "") + fmt("%.4f", v);
  }
  return {std::abs(c - 0.4) <= 1e-9 && monotone,
          "gamma=0 alpha=0.5: " + fmt("%.12f", c) + "; alpha 0.1..0.9: " + curve};
}

// 3
Outcome ntg_jacobian() {
  double worst = 0.0;
  for (Activation act : {Activation::kRelu, Activation::kTanh}) {
    for (std::uint64_t inst = 0; inst < 10; ++inst) {
      Rng g(300 + inst, static_cast<std::uint64_t>(act));
      const Eigen::MatrixXd X = gaussian(8, 5, g.substream(0));
      const Network net = init_network(5, 32, act, g.substream(1));
      const auto l = compute_lambdas(ScalingScheme::zipf(g.substream(2).uniform(), 0.5, 32));
      const double rd = std::sqrt(5.0);
      Eigen::MatrixXd J(8, 32 * 5);
      for (Eigen::Index i = 0; i < 8; ++i) {
        for (Eigen::Index j = 0; j < 32; ++j) {
          const double z = net.W.row(j).dot(X.row(i)) / rd;
          const double c = std::sqrt(l.values[j]) * net.a(j, 0) * activate_d1(act, z) / rd;
          for (Eigen::Index k = 0; k < 5; ++k) J(i, j * 5 + k) = c * X(i, k);
        }
      }
      worst = std::max(worst, (ntg(net, l, X).values - J * J.transpose()).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-10, "20 instances (ReLU, Tanh), max |NTG - J J^T| = " + fmt("%.2e", worst)};
}

// 4
Outcome gradient_fd() {
  double worst = 0.0;
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    Rng g(400 + inst);
    const Eigen::MatrixXd X = gaussian(6, 4, g.substream(0));
    const Eigen::MatrixXd Y = gaussian(6, 1, g.substream(1));
    Network net = init_network(4, 8, Activation::kTanh, g.substream(2));
    const auto l = compute_lambdas(ScalingScheme::zipf(g.substream(3).uniform(), 0.6, 8));
    const Eigen::MatrixXd G = gradient(net, l, X, Y);
    Eigen::MatrixXd F(G.rows(), G.cols());
    const double h = 1e-5;
    for (Eigen::Index j = 0; j < G.rows(); ++j) {
      for (Eigen::Index k = 0; k < G.cols(); ++k) {
        const double w = net.W(j, k);
        net.W(j, k) = w + h;
        const double up = loss(net, l, X, Y);
        net.W(j, k) = w - h;
        const double down = loss(net, l, X, Y);
        net.W(j, k) = w;
        F(j, k) = (up - down) / (2 * h);
      }
    }
    worst = std::max(worst, (G - F).norm() / F.norm());
  }
  return {worst <= 1e-5, "20 Tanh instances, max relative error " + fmt("%.2e", worst)};
}

// 5
Outcome mean_ntk_values() {
  Eigen::MatrixXd X(4, 5);
  X << 0.3, -0.2, 0.5, 0.1, 0.4,
      -0.3, 0.2, -0.5, -0.1, -0.4,
      0.9, 0.0, 0.1, -0.2, 0.1,
      -0.1, 0.6, 0.2, 0.3, -0.5;
  const double d = 5.0;
  const auto est = mean_ntg_mc(X, Activation::kRelu, 100000, Rng(5));
  double worst_z = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double want = X.row(i).squaredNorm() / (2 * d);
    worst_z = std::max(worst_z, std::abs(est.mean(i, i) - want) / est.standard_error(i, i));
  }
  const double anti = est.mean(0, 1);
  const double anti_se = est.standard_error(0, 1);
  const bool anti_ok = std::abs(anti) <= 3 * anti_se;
  return {worst_z <= 3.0 && anti_ok,
          "diagonal max |z| = " + fmt("%.2f", worst_z) + ", antipodal entry " + fmt("%.3g", anti) +
              " (SE " + fmt("%.3g", anti_se) + ")"};
}

// 6
Outcome first_step_weight_change() {
  const Dataset ds = synth_dataset(10, 5, 1.0, Rng(1, 1));
  const auto l = compute_lambdas(ScalingScheme::zipf(0.0, 0.5, 16));
  std::string detail;
  bool ok = true;
  for (Activation act : {Activation::kRelu, Activation::kTanh}) {
    const auto a = expected_first_step_weight_changes(l, ds.X, act, 200000, Rng(6, 1));
    const auto b = mc_first_step_weight_change(l, ds.X, ds.Y, act, 2000, Rng(6, 2));
    double worst = 0.0;
    int over = 0;
    for (Eigen::Index j = 0; j < a.mean.rows(); ++j) {
      for (Eigen::Index k = 0; k < a.mean.cols(); ++k) {
        const double z = std::abs(a.mean(j, k) - b.mean(j, k)) / std::hypot(a.se(j, k), b.se(j, k));
        worst = std::max(worst, z);
        over += z > 3.0;
      }
    }
    ok = ok && over == 0;
    detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(act)) +
              ": 80 entries, max |z| " + fmt("%.2f", worst) + ", beyond 3 SE " + std::to_string(over);
  }
  return {ok, detail};
}

// 7
Outcome kernel_change() {
  const Dataset ds = synth_dataset(6, 4, 1.0, Rng(1, 1));
  const auto l = compute_lambdas(ScalingScheme::zipf(0.0, 0.5, 32));
  double worst = 0.0;
  int over = 0, pairs = 0;
  for (std::size_t k = 0; k < 6; ++k) {
    for (std::size_t q = k; q < 6; ++q) {
      const auto a = expected_ntk_change(l, ds.X, k, q, Activation::kTanh, 200000, Rng(7, 1));
      const auto b = mc_ntk_change(l, ds.X, ds.Y, k, q, Activation::kTanh, 2000, 1e-4, Rng(7, 2));
      const double z = std::abs(a.mean - b.mean) / std::hypot(a.se, b.se);
      worst = std::max(worst, z);
      over += z > 3.0;
      ++pairs;
    }
  }
  return {over == 0, std::to_string(pairs) + " entries (k <= l), max |z| " + fmt("%.2f", worst) +
                         ", beyond 3 SE " + std::to_string(over)};
}

// 8
Outcome init_variance() {
  const std::size_t m = 4096, draws = 200;
  const Dataset ds = synth_dataset(5, 10, 1.0, Rng(1, 1));
  const auto C0 = ntg_variance_constant(ds.X, Activation::kRelu, 1000000, Rng(8, 1));
  std::map<double, double> emp;
  std::string detail = "C0 = " + fmt("%.5g", C0.mean);
  bool ok = true;
  for (double gamma : {0.0, 0.5, 1.0}) {
    const auto scheme = ScalingScheme::zipf(gamma, 0.5, m);
    const auto l = compute_lambdas(scheme);
    std::vector<Eigen::MatrixXd> K;
    for (std::size_t r = 0; r < draws; ++r) {
      K.push_back(ntg_values(init_network(10, m, Activation::kRelu, Rng(8, 2).substream(r)), l, ds.X));
    }
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(5, 5);
    for (const auto& k : K) mean += k;
    mean /= static_cast<double>(draws);
    double v = 0.0;
    for (const auto& k : K) v += (k - mean).squaredNorm();
    v /= static_cast<double>(draws - 1);
    emp[gamma] = v;
    if (gamma < 1.0) {
      const double pred = C0.mean * (1 - gamma) * (1 - gamma) * tilde_weights(scheme).array().square().sum();
      const double rel = std::abs(v - pred) / pred;
      ok = ok && rel <= 0.10;
      detail += "; gamma=" + fmt("%g", gamma) + ": empirical " + fmt("%.5g", v) + " vs " +
                fmt("%.5g", pred) + " (" + fmt("%.1f", 100 * rel) + "%)";
    }
  }
  const double ratio = emp[1.0] / emp[0.0];
  ok = ok && ratio <= 0.05;
  detail += "; gamma=1 / gamma=0 = " + fmt("%.2e", ratio);
  return {ok, detail};
}

// 9
Outcome global_convergence() {
  const Dataset ds = synth_dataset(20, 10, 1.0, Rng(1, 1));
  const Network net = init_network(10, 1024, Activation::kRelu, Rng(1, 3));
  const auto l = compute_lambdas(ScalingScheme::zipf(1.0, 0.5, 1024));
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.steps = 20000;
  cfg.record_every = 100;
  cfg.track_ntg = true;
  const auto t = train(net, l, ds.X, ds.Y, cfg);
  const double ratio = t.losses.back() / t.losses.front();
  const double eig0 = t.min_eigs.front();
  const double low = *std::min_element(t.min_eigs.begin(), t.min_eigs.end());
  std::size_t hit = t.last_step;
  for (std::size_t i = 0; i < t.records(); ++i) {
    if (t.losses[i] <= 1e-3 * t.losses.front()) {
      hit = t.steps[i];
      break;
    }
  }
  return {ratio <= 1e-3 && low >= 0.5 * eig0,
          "final/initial loss " + fmt("%.2e", ratio) + " (1e-3 reached by step " +
              std::to_string(hit) + "), min eig " + fmt("%.4g", low) + " vs initial " + fmt("%.4g", eig0)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct GridRuns {
  ExperimentResult first, second;
  fs::path dir_a, dir_b;
  ExperimentPlan plan;
};

GridRuns run_grid_twice() {
  GridRuns g;
  g.plan = preset_plan("desk");
  g.dir_a = fs::absolute("acceptance_grid_a");
  g.dir_b = fs::absolute("acceptance_grid_b");
  fs::remove_all(g.dir_a);
  fs::remove_all(g.dir_b);
  g.plan.out_dir = g.dir_a.string();
  g.first = run_experiment(g.plan);
  ExperimentPlan again = g.plan;
  again.out_dir = g.dir_b.string();
  g.second = run_experiment(again);
  return g;
}

// 10
Outcome feature_learning_order(const GridRuns& g) {
  const auto& s = g.first.summaries;
  bool increasing = true;
  std::string detail = "median max displacement:";
  for (std::size_t i = 0; i < s.size(); ++i) {
    detail += " (" + fmt("%g", s[i].point.gamma) + "," + fmt("%g", s[i].point.alpha) + ") " +
              fmt("%.4g", s[i].median_final_max_displacement);
    if (i > 0) increasing = increasing && s[i].median_final_max_displacement > s[i - 1].median_final_max_displacement;
  }
  const double share = s.front().median_final_ntg_change / s.back().median_final_ntg_change;
  detail += "; NTG change gamma=1 " + fmt("%.4g", s.front().median_final_ntg_change) + " vs (0,0.4) " +
            fmt("%.4g", s.back().median_final_ntg_change) + " (" + fmt("%.1f", 100 * share) + "%)";
  if (g.first.any_diverged) detail += "; some runs diverged";
  return {increasing && share <= 0.20 && !g.first.any_diverged, detail};
}

// 11
Outcome pruning(const GridRuns& g) {
  const std::vector<std::size_t> counts =
      g.plan.prune_counts.empty() ? default_prune_counts(g.plan.m) : g.plan.prune_counts;
  const auto target = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(g.plan.m)));
  const auto it = std::find(counts.begin(), counts.end(), target);
  if (it == counts.end()) return {false, "no prune count at 90% pruned"};
  const auto idx = static_cast<std::size_t>(it - counts.begin());
  const double sym = g.first.summaries.front().median_prune_train_risk[idx];
  const double asym = g.first.summaries.back().median_prune_train_risk[idx];
  return {asym < sym, "kept " + std::to_string(target) + "/" + std::to_string(g.plan.m) +
                          ": median train risk (0,0.4) " + fmt("%.4g", asym) + " vs gamma=1 " +
                          fmt("%.4g", sym)};
}

// 12
Outcome determinism(const GridRuns& g) {
  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(g.dir_a)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const fs::path rel = fs::relative(entry.path(), g.dir_a);
    ++compared;
    if (!fs::exists(g.dir_b / rel) || slurp(entry.path()) != slurp(g.dir_b / rel)) ++differing;
  }
  return {compared > 0 && differing == 0,
          std::to_string(compared) + " CSV files compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    const auto t0 = clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "scaling identities", scaling_identities);
  report(2, "departure constant", departure_constant_check);
  report(3, "NTG equals Jacobian Gram", ntg_jacobian);
  report(4, "gradient vs finite differences", gradient_fd);
  report(5, "mean NTK trivial values", mean_ntk_values);
  report(6, "expected first-step weight change", first_step_weight_change);
  report(7, "expected kernel change", kernel_change);
  report(8, "init NTG variance", init_variance);
  report(9, "global convergence at gamma=1", global_convergence);

  const auto t0 = clock::now();
  GridRuns grid;
  std::string grid_error;
  try {
    grid = run_grid_twice();
  } catch (const std::exception& e) {
    grid_error = e.what();
  }
  std::printf("(desk grid run twice in %.1f s)\n",
              std::chrono::duration<double>(clock::now() - t0).count());
  auto grid_check = [&](std::function<Outcome(const GridRuns&)> fn) {
    return [&, fn]() -> Outcome {
      if (!grid_error.empty()) return {false, "grid run failed: " + grid_error};
      return fn(grid);
    };
  };
  report(10, "feature-learning ordering", grid_check(feature_learning_order));
  report(11, "pruning at 90%", grid_check(pruning));
  report(12, "determinism", grid_check(determinism));

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
