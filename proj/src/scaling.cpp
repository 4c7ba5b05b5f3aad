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

#include "asymnet/scaling.hpp"

#include <cmath>
#include <sstream>

#include "asymnet/error.hpp"

namespace asymnet {

namespace {

// B_{2j} / (2j)! for j = 1..8.
constexpr double kBernoulliOverFactorial[] = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
};

// Euler-Maclaurin tail: sum_{k >= n} k^-s, with `terms` correction terms.
// Returns the last correction magnitude through `last`.
double zeta_tail(double s, double n, int terms, double& last) {
  double tail = std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s);
  double rising = s;                   // s (s+1) ... (s+2j-2)
  double npow = std::pow(n, -s - 1.0); // n^(-s-2j+1)
  last = 0.0;
  for (int j = 0; j < terms; ++j) {
    const double term = kBernoulliOverFactorial[j] * rising * npow;
    tail += term;
    last = std::abs(term);
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    npow /= n * n;
  }
  return tail;
}

}  // namespace

void ScalingScheme::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    fail(ErrorKind::kDomain, "gamma must lie in [0, 1], got " + std::to_string(gamma));
  }
  require(m >= 1, ErrorKind::kDomain, "width m must be positive");
  if (const auto* z = std::get_if<ZipfSource>(&source)) {
    if (!(z->alpha > 0.0 && z->alpha <= kMaxZipfAlpha)) {
      fail(ErrorKind::kDomain,
           "zipf alpha must lie in (0, 0.99], got " + std::to_string(z->alpha));
    }
    return;
  }
  const auto& w = std::get<ExplicitSource>(source).weights;
  require(!w.empty(), ErrorKind::kDomain, "explicit tilde weights are empty");
  double total = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!(std::isfinite(w[j]) && w[j] >= 0.0)) {
      fail(ErrorKind::kDomain, "explicit tilde weight " + std::to_string(j) +
                                   " is negative or non-finite");
    }
    if (j > 0 && w[j] > w[j - 1]) {
      fail(ErrorKind::kDomain, "explicit tilde weights must be nonincreasing (index " +
                                   std::to_string(j) + ")");
    }
    total += w[j];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream os;
    os.precision(17);
    os << "explicit tilde weights must sum to 1, got " << total;
    fail(ErrorKind::kDomain, os.str());
  }
}

LambdaVector LambdaVector::from_values(const Eigen::VectorXd& values) {
  return {values, Eigen::VectorXd::Zero(values.size()), values};
}

double zeta(double s) {
  if (!(s > 1.0 + 1e-6) || !std::isfinite(s)) {
    fail(ErrorKind::kDomain, "zeta requires s > 1, got " + std::to_string(s));
  }
  // Direct partial sum up to n-1, Euler-Maclaurin tail from n. Doubling n
  // until the last correction term is negligible certifies the result.
  double n = 16.0;
  for (;;) {
    double head = 0.0;
    // Sum small terms first.
    for (double k = n - 1.0; k >= 1.0; k -= 1.0) head += std::pow(k, -s);
    double last = 0.0;
    const double tail = zeta_tail(s, n, 8, last);
    if (last < 1e-17 || n >= 4096.0) return head + tail;
    n *= 2.0;
  }
}

Eigen::VectorXd zipf_weights(double alpha, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorKind::kDomain, "zipf alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  const double s = 1.0 / alpha;
  const double z = zeta(s);
  Eigen::VectorXd t(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    t[static_cast<Eigen::Index>(j)] = std::pow(static_cast<double>(j + 1), -s) / z;
  }
  return t;
}

Eigen::VectorXd tilde_weights(const ScalingScheme& scheme) {
  if (const auto* z = std::get_if<ZipfSource>(&scheme.source)) {
    return zipf_weights(z->alpha, scheme.m);
  }
  const auto& w = std::get<ExplicitSource>(scheme.source).weights;
  Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scheme.m));
  for (std::size_t j = 0; j < std::min(w.size(), scheme.m); ++j) {
    t[static_cast<Eigen::Index>(j)] = w[j];
  }
  return t;
}

LambdaVector compute_lambdas(const ScalingScheme& scheme) {
  scheme.validate();
  const Eigen::VectorXd t = tilde_weights(scheme);
  const auto m = static_cast<Eigen::Index>(scheme.m);
  // Sum the (nonincreasing) weights from the small end.
  double partial = 0.0;
  for (Eigen::Index j = m - 1; j >= 0; --j) partial += t[j];

  LambdaVector out;
  out.gamma_part = Eigen::VectorXd::Constant(m, scheme.gamma / static_cast<double>(m));
  out.asym_part = ((1.0 - scheme.gamma) / partial) * t;
  out.values = out.gamma_part + out.asym_part;
  return out;
}

double power_sum(const LambdaVector& lambdas, double r) {
  require(r >= 1.0, ErrorKind::kDomain, "power_sum requires r >= 1");
  double total = 0.0;
  for (Eigen::Index j = lambdas.values.size() - 1; j >= 0; --j) {
    total += std::pow(lambdas.values[j], r);
  }
  return total;
}

double power_sum_limit(const ScalingScheme& scheme, double r) {
  scheme.validate();
  require(r >= 1.0, ErrorKind::kDomain, "power_sum_limit requires r >= 1");
  const double scale = std::pow(1.0 - scheme.gamma, r);
  if (scale == 0.0) return 0.0;
  if (const auto* z = std::get_if<ZipfSource>(&scheme.source)) {
    const double s = 1.0 / z->alpha;
    return scale * zeta(r * s) / std::pow(zeta(s), r);
  }
  double total = 0.0;
  for (double w : std::get<ExplicitSource>(scheme.source).weights) total += std::pow(w, r);
  return scale * total;
}

double departure_constant(const ScalingScheme& scheme) {
  return power_sum_limit(scheme, 2.0);
}

double tail_mass(const ScalingScheme& scheme) {
  scheme.validate();
  const Eigen::VectorXd t = tilde_weights(scheme);
  double partial = 0.0;
  for (Eigen::Index j = t.size() - 1; j >= 0; --j) partial += t[j];
  return std::max(0.0, 1.0 - partial);
}

}  // namespace asymnet
