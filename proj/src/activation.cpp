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

#include "asymnet/activation.hpp"

#include <algorithm>
#include <cctype>

#include "asymnet/error.hpp"

namespace asymnet {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
    case Activation::kSoftplus: return "softplus";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kLinear: return "linear";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Activation a : {Activation::kRelu, Activation::kTanh, Activation::kSoftplus,
                       Activation::kSigmoid, Activation::kLinear}) {
    if (lower == to_string(a)) return a;
  }
  fail(ErrorKind::kParse, "unknown activation '" + std::string(name) + "'");
}

double second_derivative_bound(Activation act) {
  switch (act) {
    case Activation::kRelu: return 0.0;
    // |d/dx (1 - tanh^2)| peaks at tanh^2 = 1/3.
    case Activation::kTanh: return 4.0 / (3.0 * std::sqrt(3.0));
    case Activation::kSoftplus: return 0.25;
    case Activation::kSigmoid: return 1.0 / (6.0 * std::sqrt(3.0));
    case Activation::kLinear: return 0.0;
  }
  return 0.0;
}

}  // namespace asymnet
