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

// Node-scaling vectors.
//
// Each hidden node j of a width-m network carries a fixed multiplier
// sqrt(lambda_j) on its output, with
//
//   lambda_j = gamma / m + (1 - gamma) * t_j / sum_{k <= m} t_k
//
// where t_1 >= t_2 >= ... >= 0 sum to one over all j >= 1 ("tilde weights").
// gamma = 1 is the usual 1/sqrt(m) scaling; gamma < 1 makes the scaling
// asymmetric. The tilde weights come either from a Zipf law
// t_j = j^(-1/alpha) / zeta(1/alpha) or from an explicit finite sequence.

#ifndef ASYMNET_SCALING_HPP
#define ASYMNET_SCALING_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <variant>
#include <vector>

namespace asymnet {

struct ZipfSource {
  double alpha = 0.5;
};

/// Finite tilde-weight sequence; shorter than m means zero-padded.
struct ExplicitSource {
  std::vector<double> weights;
};

/// Largest Zipf exponent accepted by ScalingScheme; zeta(1/alpha) blows up as alpha -> 1.
inline constexpr double kMaxZipfAlpha = 0.99;

struct ScalingScheme {
  double gamma = 1.0;
  std::variant<ZipfSource, ExplicitSource> source = ZipfSource{};
  std::size_t m = 1;

  static ScalingScheme zipf(double gamma, double alpha, std::size_t m) {
    return {gamma, ZipfSource{alpha}, m};
  }
  static ScalingScheme explicit_weights(double gamma, std::vector<double> w,
                                        std::size_t m) {
    return {gamma, ExplicitSource{std::move(w)}, m};
  }

  bool is_zipf() const { return std::holds_alternative<ZipfSource>(source); }

  /// Throws Error(kDomain) when gamma, alpha, m or the explicit weights are invalid.
  void validate() const;
};

/// lambda split into its symmetric (gamma/m) and asymmetric parts.
struct LambdaVector {
  Eigen::VectorXd values;
  Eigen::VectorXd gamma_part;
  Eigen::VectorXd asym_part;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  double operator[](std::size_t j) const { return values[static_cast<Eigen::Index>(j)]; }

  /// Builds a vector with no part split (gamma_part = 0, asym_part = values).
  static LambdaVector from_values(const Eigen::VectorXd& values);
};

/// Riemann zeta for real s > 1 + 1e-6, absolute accuracy ~1e-14.
double zeta(double s);

/// Zipf probability masses j^(-1/alpha) / zeta(1/alpha), j = 1..m.
Eigen::VectorXd zipf_weights(double alpha, std::size_t m);

/// Tilde weights t_1..t_m of a scheme (normalized over the infinite sequence,
/// not over the first m).
Eigen::VectorXd tilde_weights(const ScalingScheme& scheme);

LambdaVector compute_lambdas(const ScalingScheme& scheme);

/// sum_j lambda_j^r.
double power_sum(const LambdaVector& lambdas, double r);

/// (1 - gamma)^r * sum_{j >= 1} t_j^r, the m -> infinity limit of power_sum.
double power_sum_limit(const ScalingScheme& scheme, double r);

/// (1 - gamma)^2 * sum_{j >= 1} t_j^2; the total variance of the limiting
/// random tangent Gram matrix per unit of C0(X). Lies in [0, 1].
double departure_constant(const ScalingScheme& scheme);

/// 1 - sum_{j <= m} t_j: tilde mass not represented at width m.
double tail_mass(const ScalingScheme& scheme);

}  // namespace asymnet

#endif  // ASYMNET_SCALING_HPP
