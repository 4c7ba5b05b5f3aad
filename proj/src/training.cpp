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

#include "asymnet/training.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "asymnet/error.hpp"
#include "asymnet/rng.hpp"

namespace asymnet {

namespace {

void check_targets(const Network& net, const MatrixRef& X, const MatrixRef& Y) {
  if (Y.rows() != X.rows() || static_cast<std::size_t>(Y.cols()) != net.outputs) {
    fail(ErrorKind::kShape, "targets are " + std::to_string(Y.rows()) + " x " +
                                std::to_string(Y.cols()) + ", expected " +
                                std::to_string(X.rows()) + " x " +
                                std::to_string(net.outputs));
  }
}

// Loss and gradient from one forward pass.
struct Evaluation {
  double loss = 0.0;
  Eigen::MatrixXd grad;
};

Evaluation evaluate(const Network& net, const Eigen::VectorXd& root_lambda,
                    const MatrixRef& X, const MatrixRef& Y, bool want_grad) {
  const double rd = std::sqrt(static_cast<double>(net.d));
  const Eigen::MatrixXd Z = (X * net.W.transpose()) / rd;
  const Eigen::MatrixXd H = apply_activation(net.activation, Z);
  const Eigen::MatrixXd R = Y - H * (root_lambda.asDiagonal() * net.a);
  Evaluation ev;
  ev.loss = 0.5 * R.squaredNorm();
  if (want_grad) {
    const Eigen::MatrixXd B = R * net.a.transpose();  // n x m
    const Eigen::MatrixXd SB = apply_activation_d1(net.activation, Z).cwiseProduct(B);
    ev.grad = (-root_lambda / rd).asDiagonal() * (SB.transpose() * X);
  }
  return ev;
}

}  // namespace

void TrainConfig::validate() const {
  require(std::isfinite(learning_rate) && learning_rate > 0.0, ErrorKind::kConfig,
          "learning_rate must be positive");
  require(record_every >= 1, ErrorKind::kConfig, "record_every must be positive");
  require(steps == 0 || record_every <= steps, ErrorKind::kConfig,
          "record_every must not exceed steps");
  if (loss_floor) {
    require(*loss_floor >= 0.0, ErrorKind::kConfig, "loss_floor must be nonnegative");
  }
}

double loss(const Network& net, const LambdaVector& lambdas, const MatrixRef& X,
            const MatrixRef& Y) {
  check_shapes(net, lambdas, X);
  check_targets(net, X, Y);
  return evaluate(net, lambdas.values.cwiseSqrt(), X, Y, false).loss;
}

Eigen::MatrixXd gradient(const Network& net, const LambdaVector& lambdas,
                         const MatrixRef& X, const MatrixRef& Y) {
  check_shapes(net, lambdas, X);
  check_targets(net, X, Y);
  return evaluate(net, lambdas.values.cwiseSqrt(), X, Y, true).grad;
}

TrainTrace train(const Network& net, const LambdaVector& lambdas, const MatrixRef& X,
                 const MatrixRef& Y, const TrainConfig& config,
                 const TrainCallbacks& callbacks) {
  config.validate();
  net.validate();
  check_shapes(net, lambdas, X);
  check_targets(net, X, Y);
  const Eigen::Index n = X.rows();
  const bool minibatch = config.batch_size > 0 && static_cast<Eigen::Index>(config.batch_size) < n;

  TrainTrace trace;
  trace.initial_network = net;
  Network cur = net;
  const Eigen::VectorXd root = lambdas.values.cwiseSqrt();

  Eigen::MatrixXd ntg0;
  auto record = [&](std::size_t step, double value) {
    trace.steps.push_back(step);
    trace.losses.push_back(value);
    trace.weight_displacements.push_back((cur.W - net.W).rowwise().norm());
    if (config.track_ntg) {
      Eigen::MatrixXd theta;
      if (config.keep_ntg_snapshots) {
        NTGMatrix full = ntg(cur, lambdas, X);
        theta = full.values;
        trace.ntg_snapshots.push_back({step, std::move(full)});
      } else {
        theta = ntg_values(cur, lambdas, X);
      }
      if (step == 0) ntg0 = theta;
      trace.min_eigs.push_back(min_eigenvalue(theta));
      trace.ntg_changes.push_back(step == 0 ? 0.0 : spectral_norm_symmetric(theta - ntg0));
    }
    if (callbacks.on_record) callbacks.on_record(RecordEvent{step, value, cur});
  };

  Rng batch_rng(config.batch_seed, 0x6d696e6962617463ull);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Eigen::MatrixXd Xb, Yb;

  double floor = 0.0;
  for (std::size_t t = 0;; ++t) {
    const bool at_record = t == 0 || t % config.record_every == 0 || t == config.steps;
    double value = 0.0;
    Eigen::MatrixXd grad;
    if (!minibatch) {
      Evaluation ev = evaluate(cur, root, X, Y, t < config.steps);
      value = ev.loss;
      grad = std::move(ev.grad);
    } else {
      if (at_record) value = evaluate(cur, root, X, Y, false).loss;
      if (t < config.steps) {
        // Partial Fisher-Yates: first batch_size entries form the batch.
        const auto b = static_cast<Eigen::Index>(config.batch_size);
        Xb.resize(b, X.cols());
        Yb.resize(b, Y.cols());
        for (Eigen::Index i = 0; i < b; ++i) {
          const auto span = static_cast<std::uint64_t>(n - i);
          const auto pick = i + static_cast<Eigen::Index>(batch_rng.below(span));
          std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick)]);
          Xb.row(i) = X.row(perm[static_cast<std::size_t>(i)]);
          Yb.row(i) = Y.row(perm[static_cast<std::size_t>(i)]);
        }
        grad = evaluate(cur, root, Xb, Yb, true).grad;
      }
    }

    if ((!minibatch || at_record) && !std::isfinite(value)) {
      throw DivergenceError(t, "loss became non-finite at step " + std::to_string(t));
    }
    if (t == 0) floor = config.loss_floor.value_or(1e-10 * value);
    const bool stop = (!minibatch || at_record) && t > 0 && value <= floor;
    if (at_record || stop) record(t, value);
    if (t >= config.steps || stop) {
      trace.early_stopped = stop && t < config.steps;
      trace.last_step = t;
      break;
    }
    cur.W.noalias() -= config.learning_rate * grad;
  }
  trace.final_network = cur;
  return trace;
}

DisplacementSummary weight_displacements(const TrainTrace& trace) {
  DisplacementSummary out;
  out.per_step = trace.weight_displacements;
  for (const auto& v : trace.weight_displacements) {
    Eigen::Index arg = 0;
    const double best = v.size() > 0 ? v.maxCoeff(&arg) : 0.0;
    out.argmax.push_back(static_cast<std::size_t>(arg));
    out.max.push_back(best);
  }
  return out;
}

}  // namespace asymnet
