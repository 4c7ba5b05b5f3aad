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

// asymnet command-line tool. Talks to the library only through asymnet.h.
//
// Exit codes: 0 success, 1 numeric / assumption / divergence failure,
// 2 usage, parse or missing-file errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "asymnet/asymnet.h"

namespace {

using nlohmann::json;

struct Failure {
  int code;
  std::string message;
};

int exit_code_for(asym_status s) {
  switch (s) {
    case ASYM_ERR_NUMERIC:
    case ASYM_ERR_DIVERGENCE:
    case ASYM_ERR_ASSUMPTION:
    case ASYM_ERR_INTERNAL:
      return 1;
    default:
      return 2;
  }
}

void check(asym_status s) {
  if (s != ASYM_OK) {
    throw Failure{exit_code_for(s), std::string(asym_status_name(s)) + ": " + asym_last_error()};
  }
}

[[noreturn]] void usage(const std::string& msg) { throw Failure{2, msg}; }

struct StringDeleter {
  void operator()(char* s) const { asym_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct SchemeDeleter {
  void operator()(asym_scheme* p) const { asym_scheme_free(p); }
};
struct DatasetDeleter {
  void operator()(asym_dataset* p) const { asym_dataset_free(p); }
};
struct NetworkDeleter {
  void operator()(asym_network* p) const { asym_network_free(p); }
};
struct TraceDeleter {
  void operator()(asym_trace* p) const { asym_trace_free(p); }
};
using Scheme = std::unique_ptr<asym_scheme, SchemeDeleter>;
using Data = std::unique_ptr<asym_dataset, DatasetDeleter>;
using Net = std::unique_ptr<asym_network, NetworkDeleter>;
using Trace = std::unique_ptr<asym_trace, TraceDeleter>;

// JSON config files: top-level keys are option long names of the chosen
// subcommand; arrays become comma-separated lists, matching the list flags.
// CLI11 reads config files on the root app only, after all flags are parsed,
// so each key is routed to the subcommand that was selected.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    const auto chosen = root_->get_subcommands();
    std::vector<std::string> parents;
    if (!chosen.empty()) parents.push_back(chosen.front()->get_name());
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      item.inputs.push_back(scalar_text(value));
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  const CLI::App* root_;

  static std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      std::string out;
      for (const auto& e : v) {
        if (!out.empty()) out += ',';
        out += scalar_text(e);
      }
      return out;
    }
    return v.dump();
  }
};

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    try {
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(item, &used));
      } else {
        if (item.find('-') != std::string::npos) throw std::invalid_argument("negative");
        out.push_back(static_cast<T>(std::stoull(item, &used)));
      }
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) usage(std::string("bad ") + what + " entry '" + item + "'");
  }
  return out;
}

asym_activation activation_of(const std::string& name) {
  asym_activation a = ASYM_RELU;
  check(asym_activation_parse(name.c_str(), &a));
  return a;
}

// Dataset flags shared by several subcommands.
struct DataOpts {
  std::string data;
  int target = -1;
  std::string synthetic = "n=20,d=10";
  std::uint64_t data_seed = 0;
  double noise = 1.0;

  void add(CLI::App* app) {
    app->add_option("--data", data, "numeric CSV with a header row");
    app->add_option("--target", target, "target column (0-based, negative from the end)");
    app->add_option("--synthetic", synthetic, "synthetic sphere data, e.g. n=20,d=10");
    app->add_option("--data-seed", data_seed, "seed for synthetic data");
    app->add_option("--noise", noise, "noise sd of synthetic targets");
  }

  Data load() const {
    asym_dataset* raw = nullptr;
    if (!data.empty()) {
      check(asym_dataset_load_csv(data.c_str(), target, &raw));
    } else {
      std::size_t n = 0, d = 0;
      std::stringstream ss(synthetic);
      std::string part;
      while (std::getline(ss, part, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) usage("bad --synthetic entry '" + part + "'");
        const std::string key = part.substr(0, eq);
        const std::string val = part.substr(eq + 1);
        const auto parsed = parse_list<std::size_t>(val, "--synthetic");
        if (parsed.size() != 1) usage("bad --synthetic value '" + part + "'");
        if (key == "n") {
          n = parsed[0];
        } else if (key == "d") {
          d = parsed[0];
        } else {
          usage("unknown --synthetic key '" + key + "'");
        }
      }
      if (n == 0 || d == 0) usage("--synthetic needs n and d");
      check(asym_dataset_synthetic(n, d, noise, data_seed, &raw));
    }
    Data ds(raw);
    check(asym_dataset_normalize(ds.get()));
    return ds;
  }
};

struct SchemeOpts {
  double gamma = 1.0;
  double alpha = 0.5;
  std::size_t m = 512;

  void add(CLI::App* app) {
    app->add_option("--gamma", gamma, "symmetric share gamma in [0,1]");
    app->add_option("--alpha", alpha, "Zipf exponent alpha in (0,0.99]");
    app->add_option("--m", m, "width");
  }

  Scheme make(std::size_t width) const {
    asym_scheme* raw = nullptr;
    check(asym_scheme_zipf(gamma, alpha, width, &raw));
    return Scheme(raw);
  }
};

// Report assumption violations; returns their count.
std::size_t report_assumptions(const asym_dataset* ds, double* C) {
  std::size_t violations = 0;
  char* msg = nullptr;
  check(asym_dataset_validate(ds, 1e-9, C, &violations, &msg));
  OwnedString owned(msg);
  if (violations) std::cerr << owned.get();
  return violations;
}

struct Split {
  Data train, test, validation;
};

Split split_data(const asym_dataset* ds, std::uint64_t seed) {
  const double fractions[3] = {0.4, 0.2, 0.4};
  asym_dataset *a = nullptr, *b = nullptr, *c = nullptr;
  check(asym_dataset_split(ds, fractions, seed, &a, &b, &c));
  return {Data(a), Data(b), Data(c)};
}

Net load_checkpoint(const std::string& path) {
  if (path.empty()) usage("--checkpoint is required");
  asym_network* raw = nullptr;
  check(asym_network_load(path.c_str(), &raw));
  return Net(raw);
}

std::size_t width_of(const asym_network* net) {
  std::size_t m = 0;
  check(asym_network_shape(net, nullptr, &m));
  return m;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{2, "cannot write " + p.string()};
  out << text;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void make_dir(const std::string& dir) {
  if (dir.empty()) usage("--out is required");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Failure{2, "cannot create " + dir + ": " + ec.message()};
}

// Every option value of a subcommand, for manifests.
json options_json(const CLI::App* app) {
  json j = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config" || name.empty()) continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      j[name] = r.size() == 1 ? json(r[0]) : json(r);
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

void write_manifest(const std::string& dir, const CLI::App* app, json extra) {
  extra["command"] = app->get_name();
  extra["options"] = options_json(app);
  extra["library_version"] = asym_version();
  extra["rng"] = "philox4x32-10";
  write_file(std::filesystem::path(dir) / "manifest.json", extra.dump(1) + "\n");
}

// ---- simulate ----

struct SimulateOpts {
  std::string grid = "paper4";
  std::string scale = "desk";
  std::size_t n = 0, d = 0, m = 0, steps = 0, record_every = 0, jobs = 1;
  double lr = 0.0;
  double gamma = -1.0, alpha = 0.5;
  std::string seeds;
  std::string activation;
  std::string transfer_k;
  std::string out;
};

int cmd_simulate(const SimulateOpts& o, const CLI::App* app) {
  char* raw = nullptr;
  check(asym_preset_plan(o.scale.c_str(), &raw));
  OwnedString preset(raw);
  json plan = json::parse(preset.get());
  if (o.grid != "paper4") usage("unknown grid '" + o.grid + "' (expected paper4)");
  if (app->count("--gamma")) {
    plan["grid"] = json::array({{{"gamma", o.gamma}, {"alpha", o.alpha}}});
  }
  if (app->count("--n")) plan["n"] = o.n;
  if (app->count("--d")) plan["d"] = o.d;
  if (app->count("--m")) plan["m"] = o.m;
  if (app->count("--lr")) plan["train"]["learning_rate"] = o.lr;
  if (app->count("--steps")) plan["train"]["steps"] = o.steps;
  if (app->count("--record-every")) {
    plan["train"]["record_every"] = o.record_every;
  } else if (app->count("--steps")) {
    const std::size_t re = plan["train"]["record_every"].get<std::size_t>();
    plan["train"]["record_every"] = o.steps == 0 ? 1 : std::min(re, o.steps);
  }
  if (app->count("--seeds")) plan["seeds"] = parse_list<std::uint64_t>(o.seeds, "--seeds");
  if (app->count("--activation")) plan["activation"] = o.activation;
  if (app->count("--transfer-k")) plan["transfer_k"] = parse_list<std::size_t>(o.transfer_k, "--transfer-k");
  // keep transfer sizes within the width
  {
    json kept = json::array();
    for (const auto& k : plan["transfer_k"]) {
      if (k.get<std::size_t>() <= plan["m"].get<std::size_t>()) kept.push_back(k);
    }
    if (!app->count("--transfer-k")) plan["transfer_k"] = kept;
  }
  make_dir(o.out);
  plan["out_dir"] = o.out;
  plan["jobs"] = o.jobs;
  int diverged = 0;
  check(asym_run_experiment(plan.dump().c_str(), &diverged, nullptr));
  std::cout << "wrote " << o.out << "/manifest.json\n";
  if (diverged) {
    std::cerr << "some runs diverged; see manifest.json\n";
    return 1;
  }
  return 0;
}

// ---- theory ----

struct TheoryOpts {
  DataOpts data;
  SchemeOpts scheme;
  std::string activation = "relu";
  std::uint64_t seed = 0;
  std::size_t samples = 200000;
  std::size_t replications = 2000;
  double delta = 0.1;
  bool no_tables = false;
  std::string out;
};

int cmd_theory(const TheoryOpts& o) {
  Data ds = o.data.load();
  if (report_assumptions(ds.get(), nullptr) > 0) return 1;
  Scheme scheme = o.scheme.make(o.scheme.m);
  const json options = {{"kappa_samples", o.samples}, {"c0_samples", o.samples},
                        {"c1_samples", o.samples},    {"g_samples", o.samples},
                        {"mc_replications", o.replications}, {"delta", o.delta},
                        {"include_tables", !o.no_tables}};
  char* raw = nullptr;
  check(asym_theory_report(ds.get(), scheme.get(), activation_of(o.activation),
                           options.dump().c_str(), o.seed, &raw));
  OwnedString report(raw);
  if (!o.out.empty()) {
    write_file(o.out, std::string(report.get()) + "\n");
  } else {
    std::cout << report.get() << "\n";
  }
  return 0;
}

// ---- train ----

struct TrainOpts {
  DataOpts data;
  SchemeOpts scheme;
  std::string activation = "relu";
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  double lr = 1.0;
  std::size_t steps = 1000;
  std::size_t record_every = 100;
  bool track_ntg = false;
  std::size_t batch_size = 0;
  std::string out;
};

int cmd_train(const TrainOpts& o, const CLI::App* app) {
  Data ds = o.data.load();
  report_assumptions(ds.get(), nullptr);
  Split parts = split_data(ds.get(), o.split_seed);
  std::size_t d = 0;
  check(asym_dataset_shape(ds.get(), nullptr, &d));
  Scheme scheme = o.scheme.make(o.scheme.m);
  asym_network* raw = nullptr;
  check(asym_network_init(d, o.scheme.m, activation_of(o.activation), o.seed, &raw));
  Net net(raw);

  asym_train_config cfg;
  asym_train_config_default(&cfg);
  cfg.learning_rate = o.lr;
  cfg.steps = o.steps;
  cfg.record_every = o.steps == 0 ? 1 : std::min(o.record_every, o.steps);
  cfg.track_ntg = o.track_ntg ? 1 : 0;
  cfg.batch_size = o.batch_size;
  cfg.batch_seed = o.seed;
  make_dir(o.out);
  const std::filesystem::path dir(o.out);

  asym_trace* traw = nullptr;
  const asym_status st = asym_train(net.get(), scheme.get(), parts.train.get(), &cfg, &traw);
  if (st == ASYM_ERR_DIVERGENCE) {
    write_manifest(o.out, app, {{"diverged", true}, {"error", asym_last_error()}});
    std::cerr << "divergence: " << asym_last_error() << "\n";
    return 1;
  }
  check(st);
  Trace trace(traw);
  check(asym_trace_write_csv(trace.get(), (dir / "trace.csv").c_str(),
                             (dir / "displacements.csv").c_str()));
  check(asym_network_save(net.get(), (dir / "initial.json").c_str()));
  asym_network* fraw = nullptr;
  check(asym_trace_final_network(trace.get(), &fraw));
  Net final_net(fraw);
  check(asym_network_save(final_net.get(), (dir / "checkpoint.json").c_str()));

  std::size_t records = 0;
  check(asym_trace_records(trace.get(), &records));
  std::size_t last_step = 0;
  double first_loss = 0.0, last_loss = 0.0;
  check(asym_trace_get(trace.get(), 0, nullptr, &first_loss, nullptr, nullptr, nullptr));
  check(asym_trace_get(trace.get(), records - 1, &last_step, &last_loss, nullptr, nullptr, nullptr));
  char* sraw = nullptr;
  check(asym_scheme_to_json(scheme.get(), &sraw));
  OwnedString sjson(sraw);
  write_manifest(o.out, app,
                 {{"diverged", false},
                  {"scheme", json::parse(sjson.get())},
                  {"initial_loss", first_loss},
                  {"final_loss", last_loss},
                  {"last_step", last_step},
                  {"files", {"trace.csv", "displacements.csv", "initial.json", "checkpoint.json"}}});
  std::cout << "final loss " << fmt17(last_loss) << " after " << last_step << " steps\n";
  return 0;
}

// ---- prune ----

struct PruneOpts {
  DataOpts data;
  SchemeOpts scheme;
  std::string checkpoint;
  std::uint64_t split_seed = 0;
  std::string kept;
  std::string out;
};

int cmd_prune(const PruneOpts& o) {
  Net net = load_checkpoint(o.checkpoint);
  const std::size_t m = width_of(net.get());
  Data ds = o.data.load();
  Split parts = split_data(ds.get(), o.split_seed);
  Scheme scheme = o.scheme.make(m);
  std::vector<std::size_t> kept;
  if (o.kept.empty()) {
    for (double f : {1.0, 0.75, 0.5, 0.25, 0.1, 0.05, 0.0}) {
      const auto k = static_cast<std::size_t>(std::llround(f * static_cast<double>(m)));
      if (kept.empty() || k < kept.back()) kept.push_back(k);
    }
  } else {
    kept = parse_list<std::size_t>(o.kept, "--kept");
  }
  std::vector<double> tr(kept.size()), te(kept.size());
  check(asym_prune_curve(net.get(), scheme.get(), parts.train.get(), parts.test.get(),
                         kept.data(), kept.size(), tr.data(), te.data()));
  make_dir(o.out);
  std::string csv = "kept,train_risk,test_risk\n";
  for (std::size_t i = 0; i < kept.size(); ++i) {
    csv += std::to_string(kept[i]) + ',' + fmt17(tr[i]) + ',' + fmt17(te[i]) + '\n';
  }
  write_file(std::filesystem::path(o.out) / "prune.csv", csv);
  return 0;
}

// ---- transfer ----

struct TransferOpts {
  DataOpts data;
  SchemeOpts scheme;
  std::string checkpoint;
  std::uint64_t split_seed = 0;
  std::uint64_t seed = 0;
  std::string k = "8,64,512";
  std::size_t head_steps = 5000;
  double head_lr = 1.0;
  bool include_sign = false;
  std::string out;
};

int cmd_transfer(const TransferOpts& o) {
  Net net = load_checkpoint(o.checkpoint);
  const std::size_t m = width_of(net.get());
  Data ds = o.data.load();
  Split parts = split_data(ds.get(), o.split_seed);
  Scheme scheme = o.scheme.make(m);
  const auto ks = parse_list<std::size_t>(o.k, "--k");
  asym_head_config head;
  asym_head_config_default(&head);
  head.steps = o.head_steps;
  head.learning_rate = o.head_lr;
  head.include_sign = o.include_sign ? 1 : 0;
  std::vector<double> tr(ks.size()), te(ks.size());
  check(asym_transfer_eval(net.get(), scheme.get(), parts.validation.get(), ks.data(), ks.size(),
                           &head, o.seed, tr.data(), te.data()));
  make_dir(o.out);
  std::string csv = "k,head_train_mse,head_test_mse\n";
  for (std::size_t i = 0; i < ks.size(); ++i) {
    csv += std::to_string(ks[i]) + ',' + fmt17(tr[i]) + ',' + fmt17(te[i]) + '\n';
  }
  write_file(std::filesystem::path(o.out) / "transfer.csv", csv);
  return 0;
}

// ---- kernel ----

struct KernelOpts {
  DataOpts data;
  SchemeOpts scheme;
  std::string checkpoint;
  std::string activation = "relu";
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  std::string rows = "train";
  std::size_t step = 0;
  std::string out;
};

int cmd_kernel(const KernelOpts& o) {
  Data ds = o.data.load();
  std::size_t d = 0;
  check(asym_dataset_shape(ds.get(), nullptr, &d));
  Net net;
  if (!o.checkpoint.empty()) {
    net = load_checkpoint(o.checkpoint);
  } else {
    asym_network* raw = nullptr;
    check(asym_network_init(d, o.scheme.m, activation_of(o.activation), o.seed, &raw));
    net.reset(raw);
  }
  Scheme scheme = o.scheme.make(width_of(net.get()));
  Data rows;
  if (o.rows == "train") {
    rows = std::move(split_data(ds.get(), o.split_seed).train);
  } else if (o.rows == "all") {
    rows = std::move(ds);
  } else {
    usage("--rows must be train or all");
  }
  make_dir(o.out);
  const std::filesystem::path dir(o.out);
  check(asym_ntg_write_csv(net.get(), scheme.get(), rows.get(), o.step, (dir / "ntg.csv").c_str()));
  double lo = 0.0, hi = 0.0, tr = 0.0;
  check(asym_ntg_spectrum(net.get(), scheme.get(), rows.get(), &lo, &hi, &tr));
  const json spec = {{"min_eig", lo}, {"max_eig", hi}, {"trace", tr}, {"step", o.step}};
  write_file(dir / "spectrum.json", spec.dump(1) + "\n");
  std::cout << "min eigenvalue " << fmt17(lo) << ", max eigenvalue " << fmt17(hi) << "\n";
  return 0;
}

CLI::App* with_config(CLI::App* sub) {
  // --config belongs to the root app and falls through from here
  sub->fallthrough();
  sub->option_defaults()->always_capture_default();
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shallow networks with asymmetric node scaling"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.set_config("--config", "", "JSON file of option values for the subcommand; flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);

  SimulateOpts sim;
  auto* s = with_config(app.add_subcommand("simulate", "synthetic experiment grid"));
  s->add_option("--grid", sim.grid, "grid preset (paper4)");
  s->add_option("--scale", sim.scale, "desk or paper");
  s->add_option("--n", sim.n, "training rows");
  s->add_option("--d", sim.d, "input dimension");
  s->add_option("--m", sim.m, "width");
  s->add_option("--gamma", sim.gamma, "run a single (gamma, alpha) point instead of the grid");
  s->add_option("--alpha", sim.alpha, "Zipf exponent for --gamma");
  s->add_option("--lr", sim.lr, "learning rate");
  s->add_option("--steps", sim.steps, "gradient steps");
  s->add_option("--record-every", sim.record_every, "record cadence");
  s->add_option("--seeds", sim.seeds, "comma-separated seeds");
  s->add_option("--activation", sim.activation, "relu, tanh, softplus, sigmoid, linear");
  s->add_option("--transfer-k", sim.transfer_k, "comma-separated top-k sizes");
  s->add_option("--jobs", sim.jobs, "parallel runs");
  s->add_option("--out", sim.out, "output directory")->required();

  TheoryOpts th;
  auto* t = with_config(app.add_subcommand("theory", "theoretical quantities and checks"));
  th.data.add(t);
  th.scheme.add(t);
  t->add_option("--activation", th.activation, "activation");
  t->add_option("--seed", th.seed, "Monte Carlo seed");
  t->add_option("--samples", th.samples, "Monte Carlo samples per estimator");
  t->add_option("--replications", th.replications, "fresh networks for the Monte Carlo tables");
  t->add_option("--delta", th.delta, "failure probability in the bounds");
  t->add_flag("--no-tables", th.no_tables, "skip the analytic-vs-Monte-Carlo tables");
  t->add_option("--out", th.out, "write the JSON report here instead of stdout");

  TrainOpts tr;
  auto* r = with_config(app.add_subcommand("train", "gradient descent on the 40% training split"));
  tr.data.add(r);
  tr.scheme.add(r);
  r->add_option("--activation", tr.activation, "activation");
  r->add_option("--seed", tr.seed, "initialization seed");
  r->add_option("--split-seed", tr.split_seed, "seed of the 40/20/40 split");
  r->add_option("--lr", tr.lr, "learning rate");
  r->add_option("--steps", tr.steps, "gradient steps");
  r->add_option("--record-every", tr.record_every, "record cadence");
  r->add_flag("--track-ntg", tr.track_ntg, "record NTG minimum eigenvalue and change");
  r->add_option("--batch-size", tr.batch_size, "mini-batch size (0: full batch)");
  r->add_option("--out", tr.out, "output directory")->required();

  PruneOpts pr;
  auto* p = with_config(app.add_subcommand("prune", "prune a checkpoint by feature importance"));
  pr.data.add(p);
  pr.scheme.add(p);
  p->add_option("--checkpoint", pr.checkpoint, "network checkpoint JSON")->required();
  p->add_option("--split-seed", pr.split_seed, "seed of the 40/20/40 split");
  p->add_option("--kept", pr.kept, "comma-separated decreasing kept counts");
  p->add_option("--out", pr.out, "output directory")->required();

  TransferOpts tf;
  auto* f = with_config(app.add_subcommand("transfer", "top-k features into a small regressor"));
  tf.data.add(f);
  tf.scheme.add(f);
  f->add_option("--checkpoint", tf.checkpoint, "network checkpoint JSON")->required();
  f->add_option("--split-seed", tf.split_seed, "seed of the 40/20/40 split");
  f->add_option("--seed", tf.seed, "head seed");
  f->add_option("--k", tf.k, "comma-separated top-k sizes");
  f->add_option("--head-steps", tf.head_steps, "head gradient steps");
  f->add_option("--head-lr", tf.head_lr, "head learning rate");
  f->add_flag("--include-sign", tf.include_sign, "multiply features by the output signs");
  f->add_option("--out", tf.out, "output directory")->required();

  KernelOpts kn;
  auto* k = with_config(app.add_subcommand("kernel", "dump the NTG and its spectrum"));
  kn.data.add(k);
  kn.scheme.add(k);
  k->add_option("--checkpoint", kn.checkpoint, "network checkpoint JSON (default: fresh init)");
  k->add_option("--activation", kn.activation, "activation for a fresh init");
  k->add_option("--seed", kn.seed, "initialization seed for a fresh init");
  k->add_option("--split-seed", kn.split_seed, "seed of the 40/20/40 split");
  k->add_option("--rows", kn.rows, "train (training split) or all");
  k->add_option("--step", kn.step, "step recorded in the sidecar");
  k->add_option("--out", kn.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim, s);
    if (t->parsed()) return cmd_theory(th);
    if (r->parsed()) return cmd_train(tr, r);
    if (p->parsed()) return cmd_prune(pr);
    if (f->parsed()) return cmd_transfer(tf);
    if (k->parsed()) return cmd_kernel(kn);
  } catch (const Failure& e) {
    std::cerr << "asymnet: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "asymnet: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
