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

// Regression datasets: the synthetic sphere task, CSV ingestion, input
// normalization and the checks on the inputs that the theory relies on
// (nonzero rows of norm at most one, no two rows parallel).

#ifndef ASYMNET_DATASET_HPP
#define ASYMNET_DATASET_HPP

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "asymnet/network.hpp"
#include "asymnet/rng.hpp"

namespace asymnet {

struct Dataset {
  Eigen::MatrixXd X;  // n x d
  Eigen::MatrixXd Y;  // n x outputs
  std::string name;
  bool normalized = false;

  std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(X.cols()); }
};

/// Rows uniform on the unit sphere (normalized Gaussians from rng.substream(0)),
/// y_i = (5/d) sum_k sin(pi x_ik) + eps_i with eps_i ~ N(0, noise_sd^2)
/// drawn from rng.substream(1).
Dataset synth_dataset(std::size_t n, std::size_t d, double noise_sd, const Rng& rng);

/// Targets of the synthetic task for given inputs (n x 1).
Eigen::MatrixXd synth_targets(const MatrixRef& X, double noise_sd, const Rng& rng);

/// Headered numeric CSV. target_column is 0-based; negative counts from the
/// end (-1 is the last column). Inputs are left unnormalized.
Dataset load_csv(const std::string& path, int target_column);

/// Divides every row by the largest row norm. Throws kAssumption on a zero row.
Dataset normalize(const Dataset& ds);

struct AssumptionReport {
  std::vector<std::size_t> zero_rows;
  std::vector<std::pair<std::size_t, std::size_t>> collinear_pairs;
  std::vector<std::size_t> oversized_rows;  // norm above 1 (+1e-12)
  double C = 0.0;                           // max |y|

  bool ok() const {
    return zero_rows.empty() && collinear_pairs.empty() && oversized_rows.empty();
  }
  /// One line per violation; empty when ok().
  std::string describe() const;
};

/// Report only; flags pairs with |cos angle| > 1 - collinearity_tol.
AssumptionReport validate_assumptions(const Dataset& ds, double collinearity_tol = 1e-9);

struct DataSplit {
  Dataset train, test, validation;
  std::vector<std::size_t> train_idx, test_idx, validation_idx;
};

/// Random partition with sizes round(n f0), round(n f1) and the remainder.
/// Throws kConfig when fractions do not sum to 1 or a part would be empty.
DataSplit split(const Dataset& ds, const std::array<double, 3>& fractions, const Rng& rng);

/// Rows of ds at the given indices.
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& idx, const std::string& name);

/// Uniform random permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> permutation(std::size_t n, Rng& gen);

}  // namespace asymnet

#endif  // ASYMNET_DATASET_HPP
