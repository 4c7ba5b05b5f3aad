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

// JSON and CSV formats: scaling schemes, network checkpoints, theory reports,
// NTG dumps and training traces. CSV numbers use 17 significant digits.

#ifndef ASYMNET_SERIALIZE_HPP
#define ASYMNET_SERIALIZE_HPP

#include <json.hpp>

#include <cstddef>
#include <string>

#include "asymnet/kernel.hpp"
#include "asymnet/network.hpp"
#include "asymnet/scaling.hpp"
#include "asymnet/theory.hpp"
#include "asymnet/training.hpp"

namespace asymnet {

using Json = nlohmann::json;

/// printf("%.17g")
std::string format_double(double v);

nlohmann::json scheme_to_json(const ScalingScheme& scheme);
/// Throws kSchema on missing or mistyped fields, kDomain on invalid values.
ScalingScheme scheme_from_json(const nlohmann::json& j);

/// {d, m, outputs, activation, seed, a, W (row-major)}
nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

nlohmann::json theory_report_to_json(const TheoryReport& rep);

struct NtgSidecar {
  std::size_t n = 0, m = 0;
  double gamma = 1.0;
  std::size_t step = 0;
};

/// Dense CSV (no header) plus "<path>.json" holding {n, m, gamma, step}.
void write_ntg_csv(const Eigen::MatrixXd& values, const NtgSidecar& meta,
                   const std::string& path);

/// step,loss,min_eig,ntg_change,max_disp; min_eig / ntg_change empty when not tracked.
std::string trace_csv(const TrainTrace& trace);
/// step,node_0,...,node_{m-1}
std::string displacements_csv(const TrainTrace& trace);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Parses JSON text; throws kParse with the parser message.
nlohmann::json parse_json(const std::string& text, const std::string& origin);

}  // namespace asymnet

#endif  // ASYMNET_SERIALIZE_HPP
