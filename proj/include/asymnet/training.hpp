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

#ifndef ASYMNET_TRAINING_HPP
#define ASYMNET_TRAINING_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "asymnet/kernel.hpp"
#include "asymnet/network.hpp"
#include "asymnet/scaling.hpp"

namespace asymnet {

/// Full-batch gradient descent; the learning rate is the time step of the
/// discretized gradient flow.
struct TrainConfig {
  double learning_rate = 1.0;
  std::size_t steps = 1000;
  std::size_t record_every = 100;
  /// Stop once the loss is at or below this value. Unset: 1e-10 * initial loss.
  std::optional<double> loss_floor;
  /// 0 trains on the full batch; otherwise rows are drawn without
  /// replacement per step from a stream seeded by batch_seed.
  std::size_t batch_size = 0;
  std::uint64_t batch_seed = 0;
  /// Compute the NTG at each record step (min eigenvalue, change since step 0).
  bool track_ntg = false;
  /// Also keep the full NTG matrices in the trace.
  bool keep_ntg_snapshots = false;

  void validate() const;
};

struct NtgSnapshot {
  std::size_t step = 0;
  NTGMatrix ntg;
};

struct TrainTrace {
  std::vector<std::size_t> steps;
  std::vector<double> losses;
  std::vector<Eigen::VectorXd> weight_displacements;  // ||w_tj - w_0j|| per node
  std::vector<double> min_eigs;     // filled when track_ntg
  std::vector<double> ntg_changes;  // ||NTG_t - NTG_0||_2, filled when track_ntg
  std::vector<NtgSnapshot> ntg_snapshots;
  Network initial_network;
  Network final_network;
  bool early_stopped = false;
  std::size_t last_step = 0;

  std::size_t records() const { return steps.size(); }
};

struct RecordEvent {
  std::size_t step;
  double loss;
  const Network& network;
};

struct TrainCallbacks {
  std::function<void(const RecordEvent&)> on_record;
};

/// L(W) = 1/2 sum_i ||y_i - f(x_i)||^2. Y is n x outputs (a column vector for scalar targets).
double loss(const Network& net, const LambdaVector& lambdas, const MatrixRef& X,
            const MatrixRef& Y);

/// dL/dW, m x d. Row j is -sqrt(lambda_j)/sqrt(d) sum_i sigma'(Z_ij) x_i (sum_o a_jo r_io).
Eigen::MatrixXd gradient(const Network& net, const LambdaVector& lambdas,
                         const MatrixRef& X, const MatrixRef& Y);

/// Runs W <- W - lr * dL/dW. Records the loss, node displacements and
/// optional NTG statistics at step 0, every record_every steps, at the last
/// step and at early stop. Throws DivergenceError when the loss goes non-finite.
TrainTrace train(const Network& net, const LambdaVector& lambdas, const MatrixRef& X,
                 const MatrixRef& Y, const TrainConfig& config,
                 const TrainCallbacks& callbacks = {});

struct DisplacementSummary {
  std::vector<Eigen::VectorXd> per_step;
  std::vector<std::size_t> argmax;  // node with largest displacement, per record
  std::vector<double> max;          // that displacement
};

DisplacementSummary weight_displacements(const TrainTrace& trace);

}  // namespace asymnet

#endif  // ASYMNET_TRAINING_HPP
