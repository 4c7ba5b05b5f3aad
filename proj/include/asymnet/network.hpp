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

// Shallow bias-free network with node scaling:
//
//   Z_j(x) = w_j . x / sqrt(d)
//   f_o(x) = sum_j sqrt(lambda_j) a_{jo} sigma(Z_j(x))
//
// Only W is trained; the signs a are drawn once and frozen. The scalar-output
// model is the outputs == 1 case; extra output columns give the multi-output
// MSE variant used for classification with one-hot targets.

#ifndef ASYMNET_NETWORK_HPP
#define ASYMNET_NETWORK_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

#include "asymnet/activation.hpp"
#include "asymnet/rng.hpp"
#include "asymnet/scaling.hpp"

namespace asymnet {

using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

struct Network {
  std::size_t d = 1;
  std::size_t m = 1;
  std::size_t outputs = 1;
  Eigen::MatrixXd W;  // m x d, row j = w_j
  Eigen::MatrixXd a;  // m x outputs, entries +-1
  Activation activation = Activation::kRelu;
  std::uint64_t seed = 0;

  /// Checks shapes, a in {-1, +1}, W finite. Throws Error.
  void validate() const;
};

/// w_j ~ N(0, I_d) iid, a_{jo} uniform on {-1, +1}. W is filled row by row
/// from rng.substream(0) and a from rng.substream(1), so the first m' nodes
/// of a width-m network coincide with a width-m' network from the same rng.
Network init_network(std::size_t d, std::size_t m, Activation activation,
                     const Rng& rng, std::size_t outputs = 1);

/// n x m matrix of Z_j(x_i).
Eigen::MatrixXd preactivations(const Network& net, const MatrixRef& X);

/// n x outputs matrix of network outputs.
Eigen::MatrixXd forward(const Network& net, const LambdaVector& lambdas,
                        const MatrixRef& X);

struct FeatureOptions {
  bool include_scale = true;  // multiply column j by sqrt(lambda_j)
  bool include_sign = false;  // multiply column j by a_{j0}
};

/// n x m hidden representation sigma(Z_ij), optionally scaled / signed.
/// With the defaults, features * a.col(0) reproduces forward(...).col(0).
Eigen::MatrixXd hidden_features(const Network& net, const LambdaVector& lambdas,
                                const MatrixRef& X, FeatureOptions opts = {});

/// Elementwise sigma / sigma' over a matrix.
Eigen::MatrixXd apply_activation(Activation act, const MatrixRef& Z);
Eigen::MatrixXd apply_activation_d1(Activation act, const MatrixRef& Z);

/// Throws Error(kShape) unless X has net.d columns and lambdas has net.m entries.
void check_shapes(const Network& net, const LambdaVector& lambdas, const MatrixRef& X);

}  // namespace asymnet

#endif  // ASYMNET_NETWORK_HPP
