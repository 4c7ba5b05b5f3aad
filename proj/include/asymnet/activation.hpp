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

#ifndef ASYMNET_ACTIVATION_HPP
#define ASYMNET_ACTIVATION_HPP

#include <cmath>
#include <string>
#include <string_view>

namespace asymnet {

enum class Activation { kRelu, kTanh, kSoftplus, kSigmoid, kLinear };

std::string_view to_string(Activation act);
/// Accepts "relu", "tanh", "softplus", "sigmoid", "linear" (case-insensitive).
Activation parse_activation(std::string_view name);

/// True for every kind except ReLU.
inline bool is_smooth(Activation act) { return act != Activation::kRelu; }

/// sup |sigma''|; zero for ReLU (no second derivative) and Linear.
double second_derivative_bound(Activation act);

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double activate(Activation act, double x) {
  switch (act) {
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kTanh: return std::tanh(x);
    case Activation::kSoftplus:
      return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    case Activation::kSigmoid: return sigmoid(x);
    case Activation::kLinear: return x;
  }
  return 0.0;
}

/// First derivative; ReLU uses the weak derivative 1{x > 0}, so 0 at x = 0.
inline double activate_d1(Activation act, double x) {
  switch (act) {
    case Activation::kRelu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::kSoftplus: return sigmoid(x);
    case Activation::kSigmoid: {
      const double s = sigmoid(x);
      return s * (1.0 - s);
    }
    case Activation::kLinear: return 1.0;
  }
  return 0.0;
}

/// Second derivative; 0 for ReLU away from the kink.
inline double activate_d2(Activation act, double x) {
  switch (act) {
    case Activation::kRelu: return 0.0;
    case Activation::kTanh: {
      const double t = std::tanh(x);
      return -2.0 * t * (1.0 - t * t);
    }
    case Activation::kSoftplus: {
      const double s = sigmoid(x);
      return s * (1.0 - s);
    }
    case Activation::kSigmoid: {
      const double s = sigmoid(x);
      return s * (1.0 - s) * (1.0 - 2.0 * s);
    }
    case Activation::kLinear: return 0.0;
  }
  return 0.0;
}

}  // namespace asymnet

#endif  // ASYMNET_ACTIVATION_HPP
