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

#include "asymnet/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "asymnet/error.hpp"

namespace asymnet {

namespace {

template <typename T>
T field(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorKind::kSchema, std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::kSchema, std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

Json vector_json(const Eigen::VectorXd& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Json estimate_json(const McEstimate& e) {
  return {{"mean", e.mean}, {"se", e.se}, {"samples", e.samples}};
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json scheme_to_json(const ScalingScheme& scheme) {
  Json src;
  if (scheme.is_zipf()) {
    src = {{"kind", "zipf"}, {"alpha", std::get<ZipfSource>(scheme.source).alpha}};
  } else {
    src = {{"kind", "explicit"}, {"weights", std::get<ExplicitSource>(scheme.source).weights}};
  }
  return {{"gamma", scheme.gamma}, {"source", src}, {"m", scheme.m}};
}

ScalingScheme scheme_from_json(const Json& j) {
  ScalingScheme s;
  s.gamma = field<double>(j, "gamma", "scheme");
  s.m = field<std::size_t>(j, "m", "scheme");
  const Json src = field<Json>(j, "source", "scheme");
  const auto kind = field<std::string>(src, "kind", "scheme source");
  if (kind == "zipf") {
    s.source = ZipfSource{field<double>(src, "alpha", "scheme source")};
  } else if (kind == "explicit") {
    s.source = ExplicitSource{field<std::vector<double>>(src, "weights", "scheme source")};
  } else {
    fail(ErrorKind::kSchema, "scheme source: unknown kind '" + kind + "'");
  }
  s.validate();
  return s;
}

Json network_to_json(const Network& net) {
  std::vector<double> w;
  w.reserve(static_cast<std::size_t>(net.W.size()));
  for (Eigen::Index j = 0; j < net.W.rows(); ++j) {
    for (Eigen::Index k = 0; k < net.W.cols(); ++k) w.push_back(net.W(j, k));
  }
  std::vector<double> a;
  for (Eigen::Index j = 0; j < net.a.rows(); ++j) {
    for (Eigen::Index o = 0; o < net.a.cols(); ++o) a.push_back(net.a(j, o));
  }
  return {{"d", net.d},
          {"m", net.m},
          {"outputs", net.outputs},
          {"activation", std::string(to_string(net.activation))},
          {"seed", net.seed},
          {"a", a},
          {"W", w}};
}

Network network_from_json(const Json& j) {
  Network net;
  net.d = field<std::size_t>(j, "d", "network");
  net.m = field<std::size_t>(j, "m", "network");
  net.outputs = j.contains("outputs") ? field<std::size_t>(j, "outputs", "network") : 1;
  net.activation = parse_activation(field<std::string>(j, "activation", "network"));
  net.seed = j.contains("seed") ? field<std::uint64_t>(j, "seed", "network") : 0;
  const auto w = field<std::vector<double>>(j, "W", "network");
  const auto a = field<std::vector<double>>(j, "a", "network");
  require(w.size() == net.m * net.d, ErrorKind::kSchema, "network: W must have m*d entries");
  require(a.size() == net.m * net.outputs, ErrorKind::kSchema,
          "network: a must have m*outputs entries");
  net.W.resize(static_cast<Eigen::Index>(net.m), static_cast<Eigen::Index>(net.d));
  for (std::size_t r = 0; r < net.m; ++r) {
    for (std::size_t k = 0; k < net.d; ++k) {
      net.W(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = w[r * net.d + k];
    }
  }
  net.a.resize(static_cast<Eigen::Index>(net.m), static_cast<Eigen::Index>(net.outputs));
  for (std::size_t r = 0; r < net.m; ++r) {
    for (std::size_t o = 0; o < net.outputs; ++o) {
      net.a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(o)) = a[r * net.outputs + o];
    }
  }
  try {
    net.validate();
  } catch (const Error& e) {
    fail(ErrorKind::kSchema, std::string("network: ") + e.what());
  }
  return net;
}

void save_network(const Network& net, const std::string& path) {
  write_text_file(path, network_to_json(net).dump(1) + "\n");
}

Network load_network(const std::string& path) {
  return network_from_json(parse_json(read_text_file(path), path));
}

Json theory_report_to_json(const TheoryReport& rep) {
  Json j;
  j["n"] = rep.n;
  j["d"] = rep.d;
  j["m"] = rep.m;
  j["gamma"] = rep.gamma;
  j["activation"] = std::string(to_string(rep.activation));
  j["kappa_n"] = rep.kappa_n;
  j["kappa_half_width"] = rep.kappa_half_width;
  j["departure_constant"] = rep.departure_constant;
  j["tail_mass"] = rep.tail_mass;
  j["C0"] = estimate_json(rep.C0);
  j["C1"] = rep.C1 ? estimate_json(*rep.C1) : Json(nullptr);
  j["params"] = {{"C", rep.params.C},
                 {"M", rep.params.M},
                 {"C1", rep.params.C1},
                 {"delta", rep.params.delta},
                 {"D0", rep.params.D0}};
  if (rep.bounds) {
    const BoundReport& b = *rep.bounds;
    j["decay_rate"] = b.decay_rate;
    j["width_required"] = b.width_required;
    j["width_terms"] = std::vector<double>(b.width_terms.begin(), b.width_terms.end());
    j["weight_bounds"] = vector_json(b.weight_bound);
    j["ntg_bound"] = b.ntg_bound;
  } else {
    j["decay_rate"] = nullptr;
    j["width_required"] = nullptr;
    j["weight_bounds"] = nullptr;
    j["ntg_bound"] = nullptr;
    j["bounds_note"] = "bounds need gamma > 0 and kappa_n > 0";
  }
  Json wt = Json::array();
  for (const auto& r : rep.weight_change_table) {
    wt.push_back({{"j", r.j}, {"k", r.k}, {"analytic", r.analytic},
                  {"analytic_se", r.analytic_se}, {"mc_mean", r.mc_mean}, {"mc_se", r.mc_se}});
  }
  j["weight_change_table"] = wt;
  Json kt = Json::array();
  for (const auto& r : rep.kernel_change_table) {
    kt.push_back({{"k", r.k}, {"l", r.l}, {"analytic", r.analytic},
                  {"analytic_se", r.analytic_se}, {"mc_mean", r.mc_mean}, {"mc_se", r.mc_se}});
  }
  j["kernel_change_table"] = kt;
  return j;
}

void write_ntg_csv(const Eigen::MatrixXd& values, const NtgSidecar& meta,
                   const std::string& path) {
  std::string out;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
      if (k) out += ',';
      out += format_double(values(i, k));
    }
    out += '\n';
  }
  write_text_file(path, out);
  const Json side = {{"n", meta.n}, {"m", meta.m}, {"gamma", meta.gamma}, {"step", meta.step}};
  write_text_file(path + ".json", side.dump(1) + "\n");
}

std::string trace_csv(const TrainTrace& trace) {
  std::string out = "step,loss,min_eig,ntg_change,max_disp\n";
  const bool ntg = trace.min_eigs.size() == trace.steps.size();
  for (std::size_t r = 0; r < trace.steps.size(); ++r) {
    const auto& disp = trace.weight_displacements[r];
    out += std::to_string(trace.steps[r]) + ',' + format_double(trace.losses[r]) + ',';
    if (ntg) out += format_double(trace.min_eigs[r]);
    out += ',';
    if (ntg) out += format_double(trace.ntg_changes[r]);
    out += ',' + format_double(disp.size() ? disp.maxCoeff() : 0.0) + '\n';
  }
  return out;
}

std::string displacements_csv(const TrainTrace& trace) {
  std::string out = "step";
  const Eigen::Index m =
      trace.weight_displacements.empty() ? 0 : trace.weight_displacements.front().size();
  for (Eigen::Index j = 0; j < m; ++j) out += ",node_" + std::to_string(j);
  out += '\n';
  for (std::size_t r = 0; r < trace.steps.size(); ++r) {
    out += std::to_string(trace.steps[r]);
    for (Eigen::Index j = 0; j < m; ++j) out += ',' + format_double(trace.weight_displacements[r][j]);
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::kIo, "write failed for " + path);
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kParse, origin + ": " + e.what());
  }
}

}  // namespace asymnet
