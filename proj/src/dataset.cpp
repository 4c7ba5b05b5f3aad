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

#include "asymnet/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string_view>

#include "asymnet/error.hpp"

namespace asymnet {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos
                                                                          : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(const std::string& path, std::size_t line, std::size_t col) {
  return path + ":" + std::to_string(line) + ": column " + std::to_string(col + 1);
}

}  // namespace

Eigen::MatrixXd synth_targets(const MatrixRef& X, double noise_sd, const Rng& rng) {
  require(noise_sd >= 0.0, ErrorKind::kDomain, "noise_sd must be nonnegative");
  const double d = static_cast<double>(X.cols());
  Rng gen = rng.substream(1);
  Eigen::MatrixXd Y(X.rows(), 1);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < X.cols(); ++k) s += std::sin(std::numbers::pi * X(i, k));
    // the noise draw is consumed even when noise_sd is 0 so streams line up
    const double eps = gen.normal();
    Y(i, 0) = 5.0 / d * s + noise_sd * eps;
  }
  return Y;
}

Dataset synth_dataset(std::size_t n, std::size_t d, double noise_sd, const Rng& rng) {
  require(n >= 1 && d >= 1, ErrorKind::kDomain, "synthetic data needs n, d >= 1");
  Dataset ds;
  ds.name = "synthetic";
  ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Rng gen = rng.substream(0);
  for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
    double norm = 0.0;
    do {
      for (Eigen::Index k = 0; k < ds.X.cols(); ++k) ds.X(i, k) = gen.normal();
      norm = ds.X.row(i).norm();
    } while (norm == 0.0);
    ds.X.row(i) /= norm;
  }
  ds.Y = synth_targets(ds.X, noise_sd, rng);
  ds.normalized = true;
  return ds;
}

Dataset load_csv(const std::string& path, int target_column) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      cols = split_fields(line).size();
      break;
    }
  }
  require(cols >= 2, ErrorKind::kSchema, path + ": need a header with at least two columns");
  const int c = static_cast<int>(cols);
  require(target_column >= -c && target_column < c, ErrorKind::kSchema,
          path + ": target column " + std::to_string(target_column) + " out of range for " +
              std::to_string(cols) + " columns");
  const std::size_t target =
      static_cast<std::size_t>(target_column < 0 ? c + target_column : target_column);

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != cols) {
      fail(ErrorKind::kParse, path + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(cols) + " fields, found " +
                                  std::to_string(fields.size()));
    }
    for (std::size_t k = 0; k < cols; ++k) {
      double v = 0.0;
      const auto f = fields[k];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        fail(ErrorKind::kParse,
             where(path, line_no, k) + ": not a number: '" + std::string(f) + "'");
      }
      if (!std::isfinite(v)) {
        fail(ErrorKind::kParse, where(path, line_no, k) + ": non-finite value");
      }
      values.push_back(v);
    }
    ++rows;
  }
  require(rows >= 1, ErrorKind::kSchema, path + ": no data rows");

  Dataset ds;
  ds.name = path;
  ds.X.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols - 1));
  ds.Y.resize(static_cast<Eigen::Index>(rows), 1);
  for (std::size_t i = 0; i < rows; ++i) {
    Eigen::Index out = 0;
    for (std::size_t k = 0; k < cols; ++k) {
      const double v = values[i * cols + k];
      if (k == target) {
        ds.Y(static_cast<Eigen::Index>(i), 0) = v;
      } else {
        ds.X(static_cast<Eigen::Index>(i), out++) = v;
      }
    }
    if (ds.X.row(static_cast<Eigen::Index>(i)).isZero(0.0)) {
      fail(ErrorKind::kAssumption,
           path + ": data row " + std::to_string(i + 1) + " has all-zero inputs");
    }
  }
  return ds;
}

Dataset normalize(const Dataset& ds) {
  require(ds.X.rows() >= 1, ErrorKind::kShape, "cannot normalize an empty dataset");
  const Eigen::VectorXd norms = ds.X.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (norms[i] == 0.0) {
      fail(ErrorKind::kAssumption, "input row " + std::to_string(i) + " is zero");
    }
  }
  Dataset out = ds;
  const double scale = norms.maxCoeff();
  out.X = ds.X / scale;
  // make the largest norm exactly one
  Eigen::Index arg = 0;
  norms.maxCoeff(&arg);
  out.X.row(arg) = ds.X.row(arg) / norms[arg];
  out.normalized = true;
  return out;
}

std::string AssumptionReport::describe() const {
  std::ostringstream os;
  for (auto i : zero_rows) os << "input row " << i << " is zero (Assumption 1(a) violated)\n";
  for (auto i : oversized_rows) {
    os << "input row " << i << " has norm above 1 (Assumption 1(a) violated)\n";
  }
  for (const auto& [i, j] : collinear_pairs) {
    os << "input rows " << i << " and " << j << " are parallel (Assumption 1(b) violated)\n";
  }
  return os.str();
}

AssumptionReport validate_assumptions(const Dataset& ds, double collinearity_tol) {
  require(collinearity_tol >= 0.0, ErrorKind::kDomain, "collinearity_tol must be >= 0");
  AssumptionReport rep;
  const Eigen::VectorXd norms = ds.X.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (norms[i] == 0.0) rep.zero_rows.push_back(static_cast<std::size_t>(i));
    if (norms[i] > 1.0 + 1e-12) rep.oversized_rows.push_back(static_cast<std::size_t>(i));
  }
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (norms[i] == 0.0) continue;
    for (Eigen::Index j = i + 1; j < norms.size(); ++j) {
      if (norms[j] == 0.0) continue;
      const double cosine = ds.X.row(i).dot(ds.X.row(j)) / (norms[i] * norms[j]);
      if (std::abs(cosine) > 1.0 - collinearity_tol) {
        rep.collinear_pairs.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
  rep.C = ds.Y.size() > 0 ? ds.Y.cwiseAbs().maxCoeff() : 0.0;
  return rep;
}

std::vector<std::size_t> permutation(std::size_t n, Rng& gen) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(gen.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& idx, const std::string& name) {
  Dataset out;
  out.name = name;
  out.normalized = ds.normalized;
  out.X.resize(static_cast<Eigen::Index>(idx.size()), ds.X.cols());
  out.Y.resize(static_cast<Eigen::Index>(idx.size()), ds.Y.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    require(idx[r] < ds.n(), ErrorKind::kShape, "subset index out of range");
    out.X.row(static_cast<Eigen::Index>(r)) = ds.X.row(static_cast<Eigen::Index>(idx[r]));
    out.Y.row(static_cast<Eigen::Index>(r)) = ds.Y.row(static_cast<Eigen::Index>(idx[r]));
  }
  return out;
}

DataSplit split(const Dataset& ds, const std::array<double, 3>& fractions, const Rng& rng) {
  for (double f : fractions) {
    require(f >= 0.0, ErrorKind::kConfig, "split fractions must be nonnegative");
  }
  require(std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) < 1e-9, ErrorKind::kConfig,
          "split fractions must sum to 1");
  const std::size_t n = ds.n();
  const auto n0 = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fractions[0]));
  const auto n1 = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fractions[1]));
  require(n0 >= 1 && n1 >= 1 && n0 + n1 < n, ErrorKind::kConfig,
          "split of " + std::to_string(n) + " rows leaves an empty part");
  Rng gen = rng.substream(0);
  const auto perm = permutation(n, gen);
  DataSplit out;
  out.train_idx.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n0));
  out.test_idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(n0),
                      perm.begin() + static_cast<std::ptrdiff_t>(n0 + n1));
  out.validation_idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(n0 + n1), perm.end());
  out.train = subset(ds, out.train_idx, ds.name + "/train");
  out.test = subset(ds, out.test_idx, ds.name + "/test");
  out.validation = subset(ds, out.validation_idx, ds.name + "/validation");
  return out;
}

}  // namespace asymnet
