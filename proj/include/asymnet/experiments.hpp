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

// Pruning by feature importance, transfer of top-k hidden features to a
// small external regressor, and the grid runner for synthetic experiments.

#ifndef ASYMNET_EXPERIMENTS_HPP
#define ASYMNET_EXPERIMENTS_HPP

#include <Eigen/Dense>

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "asymnet/dataset.hpp"
#include "asymnet/network.hpp"
#include "asymnet/rng.hpp"
#include "asymnet/scaling.hpp"
#include "asymnet/training.hpp"

namespace asymnet {

/// importance_j = lambda_j ||w_j||^2
Eigen::VectorXd feature_importance(const Network& net, const LambdaVector& lambdas);

/// Node indices by decreasing importance; ties keep the lower index first.
std::vector<std::size_t> importance_order(const Eigen::VectorXd& importance);

struct PruneCurve {
  std::vector<std::size_t> kept_counts;
  std::vector<double> train_risk;  // 1/2 sum of squared residuals
  std::vector<double> test_risk;
};

/// Keeps the top-k nodes by importance (others get lambda = 0) for each k.
/// kept_counts must be strictly decreasing and at most m.
PruneCurve prune_curve(const Network& net, const LambdaVector& lambdas, const Dataset& train,
                       const Dataset& test, const std::vector<std::size_t>& kept_counts);

/// kept_counts for a width-m network: m * {1, .75, .5, .25, .1, .05, 0}, rounded, deduplicated.
std::vector<std::size_t> default_prune_counts(std::size_t m);

/// Two-layer ReLU regressor with biases, both layers trained by full-batch GD
/// on (1/2) mean squared error. Weights and biases start uniform on
/// +-1/sqrt(fan_in).
struct HeadConfig {
  std::size_t hidden = 64;
  std::size_t steps = 5000;
  double learning_rate = 1.0;
  FeatureOptions features;
};

struct TransferResult {
  std::vector<std::size_t> k;
  std::vector<double> head_train_mse;
  std::vector<double> head_test_mse;
};

/// Splits heldout 50/50 into head-train / head-test, feeds the top-k hidden
/// features by importance to a fresh head per k. k = 0 predicts the
/// head-train mean. k > m is a config error.
TransferResult transfer_eval(const Network& net, const LambdaVector& lambdas,
                             const Dataset& heldout, const std::vector<std::size_t>& top_k,
                             const HeadConfig& head, const Rng& rng);

struct GridPoint {
  double gamma = 1.0;
  double alpha = 0.5;
};

struct ExperimentPlan {
  std::vector<GridPoint> grid;
  std::vector<std::uint64_t> seeds;
  std::size_t n = 20;  // training rows; n / 0.4 rows are drawn and split 40/20/40
  std::size_t d = 10;
  std::size_t m = 512;
  double noise_sd = 1.0;
  Activation activation = Activation::kRelu;
  TrainConfig train;
  std::vector<std::size_t> prune_counts;  // empty: default_prune_counts(m)
  std::vector<std::size_t> transfer_k;    // empty: skip transfer
  HeadConfig head;
  std::string out_dir;
  std::size_t jobs = 1;

  void validate() const;
};

/// The four (gamma, alpha) pairs of the synthetic study.
std::vector<GridPoint> paper4_grid();

/// Desk scale: n=20, d=10, m=512, 20000 steps of lr 1.0, seeds 1..5.
/// Paper scale: n=100, d=50, m=2000, 50000 steps.
ExperimentPlan preset_plan(const std::string& scale);

nlohmann::json plan_to_json(const ExperimentPlan& plan);
/// Missing keys keep the defaults of `base`.
ExperimentPlan plan_from_json(const nlohmann::json& j, const ExperimentPlan& base = {});

struct RunResult {
  GridPoint point;
  std::uint64_t seed = 0;
  std::string dir;
  bool diverged = false;
  std::string error;
  std::size_t last_step = 0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  double final_max_displacement = 0.0;
  double final_ntg_change = 0.0;
  double initial_min_eig = 0.0;
  double min_min_eig = 0.0;
  PruneCurve prune;
  TransferResult transfer;
};

struct GridSummary {
  GridPoint point;
  double median_final_max_displacement = 0.0;
  double median_final_ntg_change = 0.0;
  double median_final_loss = 0.0;
  std::vector<double> median_prune_train_risk;  // aligned with prune counts
};

struct ExperimentResult {
  std::vector<RunResult> runs;         // grid-major, then seeds
  std::vector<GridSummary> summaries;  // per grid point, medians over seeds
  bool any_diverged = false;
};

/// Trains every (grid point, seed); writes one directory per run under
/// plan.out_dir (config.json, trace.csv, displacements.csv, prune.csv,
/// transfer.csv, manifest.json) and a top-level manifest.json. Data and
/// initial weights depend only on the seed. A diverging run is recorded and
/// the others continue.
ExperimentResult run_experiment(const ExperimentPlan& plan);

/// Median of a nonempty sample (mean of the middle pair for even sizes).
double median(std::vector<double> v);

/// CSV text of a prune curve / transfer result.
std::string prune_csv(const PruneCurve& curve);
std::string transfer_csv(const TransferResult& result);

}  // namespace asymnet

#endif  // ASYMNET_EXPERIMENTS_HPP
