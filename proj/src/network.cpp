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

#include "asymnet/network.hpp"

#include <cmath>
#include <string>

#include "asymnet/error.hpp"

namespace asymnet {

void Network::validate() const {
  require(d >= 1 && m >= 1 && outputs >= 1, ErrorKind::kShape,
          "network dimensions must be positive");
  require(static_cast<std::size_t>(W.rows()) == m &&
              static_cast<std::size_t>(W.cols()) == d,
          ErrorKind::kShape, "W must be m x d");
  require(static_cast<std::size_t>(a.rows()) == m &&
              static_cast<std::size_t>(a.cols()) == outputs,
          ErrorKind::kShape, "a must be m x outputs");
  require(W.allFinite(), ErrorKind::kNumeric, "W contains NaN or Inf");
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double v = a.data()[i];
    require(v == 1.0 || v == -1.0, ErrorKind::kSchema, "output signs must be +1 or -1");
  }
}

Network init_network(std::size_t d, std::size_t m, Activation activation,
                     const Rng& rng, std::size_t outputs) {
  require(d >= 1 && m >= 1 && outputs >= 1, ErrorKind::kDomain,
          "init_network requires d, m, outputs >= 1");
  Network net;
  net.d = d;
  net.m = m;
  net.outputs = outputs;
  net.activation = activation;
  net.seed = rng.seed();
  net.W.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  net.a.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(outputs));
  Rng wr = rng.substream(0);
  Rng ar = rng.substream(1);
  for (Eigen::Index j = 0; j < net.W.rows(); ++j) {
    for (Eigen::Index k = 0; k < net.W.cols(); ++k) net.W(j, k) = wr.normal();
  }
  for (Eigen::Index j = 0; j < net.a.rows(); ++j) {
    for (Eigen::Index o = 0; o < net.a.cols(); ++o) net.a(j, o) = ar.sign();
  }
  return net;
}

void check_shapes(const Network& net, const LambdaVector& lambdas, const MatrixRef& X) {
  if (static_cast<std::size_t>(X.cols()) != net.d) {
    fail(ErrorKind::kShape, "input has " + std::to_string(X.cols()) +
                                " columns, network expects d = " + std::to_string(net.d));
  }
  if (lambdas.size() != net.m) {
    fail(ErrorKind::kShape, "lambda vector has " + std::to_string(lambdas.size()) +
                                " entries, network has m = " + std::to_string(net.m));
  }
}

Eigen::MatrixXd preactivations(const Network& net, const MatrixRef& X) {
  if (static_cast<std::size_t>(X.cols()) != net.d) {
    fail(ErrorKind::kShape, "input has " + std::to_string(X.cols()) +
                                " columns, network expects d = " + std::to_string(net.d));
  }
  return (X * net.W.transpose()) / std::sqrt(static_cast<double>(net.d));
}

Eigen::MatrixXd apply_activation(Activation act, const MatrixRef& Z) {
  return Z.unaryExpr([act](double z) { return activate(act, z); });
}

Eigen::MatrixXd apply_activation_d1(Activation act, const MatrixRef& Z) {
  return Z.unaryExpr([act](double z) { return activate_d1(act, z); });
}

Eigen::MatrixXd forward(const Network& net, const LambdaVector& lambdas,
                        const MatrixRef& X) {
  check_shapes(net, lambdas, X);
  const Eigen::MatrixXd H = apply_activation(net.activation, preactivations(net, X));
  const Eigen::VectorXd root = lambdas.values.cwiseSqrt();
  return H * (root.asDiagonal() * net.a);
}

Eigen::MatrixXd hidden_features(const Network& net, const LambdaVector& lambdas,
                                const MatrixRef& X, FeatureOptions opts) {
  check_shapes(net, lambdas, X);
  Eigen::MatrixXd H = apply_activation(net.activation, preactivations(net, X));
  Eigen::VectorXd colscale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(net.m));
  if (opts.include_scale) colscale = colscale.cwiseProduct(lambdas.values.cwiseSqrt());
  if (opts.include_sign) colscale = colscale.cwiseProduct(net.a.col(0));
  return H * colscale.asDiagonal();
}

}  // namespace asymnet
