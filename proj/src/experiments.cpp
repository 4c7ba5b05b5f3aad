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

#include "asymnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <thread>

#include "asymnet/error.hpp"
#include "asymnet/serialize.hpp"

namespace asymnet {

namespace {

// Stream ids under a run seed.
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kSplitStream = 2;
constexpr std::uint64_t kInitStream = 3;
constexpr std::uint64_t kTransferStream = 4;

constexpr const char* kRngName = "philox4x32-10";

LambdaVector masked(const LambdaVector& lambdas, const std::vector<std::size_t>& order,
                    std::size_t keep) {
  LambdaVector out = lambdas;
  for (std::size_t r = keep; r < order.size(); ++r) {
    const auto j = static_cast<Eigen::Index>(order[r]);
    out.values[j] = 0.0;
    out.gamma_part[j] = 0.0;
    out.asym_part[j] = 0.0;
  }
  return out;
}

double risk(const Network& net, const LambdaVector& lambdas, const Dataset& ds) {
  return 0.5 * (ds.Y - forward(net, lambdas, ds.X)).squaredNorm();
}

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& y) {
  return (pred - y).squaredNorm() / static_cast<double>(y.size());
}

double uniform_pm(Rng& gen, double bound) { return gen.uniform(-bound, bound); }

struct Head {
  Eigen::MatrixXd W1;  // hidden x k
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;  // hidden
  double b2 = 0.0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& F) const {
    const Eigen::MatrixXd H = ((F * W1.transpose()).rowwise() + b1.transpose()).cwiseMax(0.0);
    return (H * w2).array() + b2;
  }
};

Head train_head(const Eigen::MatrixXd& F, const Eigen::VectorXd& y, const HeadConfig& cfg,
                Rng& gen) {
  const auto k = F.cols();
  const auto h = static_cast<Eigen::Index>(cfg.hidden);
  Head head;
  const double b_in = 1.0 / std::sqrt(static_cast<double>(k));
  const double b_out = 1.0 / std::sqrt(static_cast<double>(h));
  head.W1.resize(h, k);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) head.W1(r, c) = uniform_pm(gen, b_in);
  }
  head.b1.resize(h);
  for (Eigen::Index r = 0; r < h; ++r) head.b1[r] = uniform_pm(gen, b_in);
  head.w2.resize(h);
  for (Eigen::Index r = 0; r < h; ++r) head.w2[r] = uniform_pm(gen, b_out);
  head.b2 = uniform_pm(gen, b_out);

  const double inv_n = 1.0 / static_cast<double>(F.rows());
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    const Eigen::MatrixXd P = (F * head.W1.transpose()).rowwise() + head.b1.transpose();
    const Eigen::MatrixXd H = P.cwiseMax(0.0);
    const Eigen::VectorXd r = ((H * head.w2).array() + head.b2).matrix() - y;
    if (!std::isfinite(r.squaredNorm())) {
      throw DivergenceError(t, "transfer head diverged at step " + std::to_string(t));
    }
    const Eigen::VectorXd g_out = r * inv_n;
    const Eigen::MatrixXd G_hidden =
        (g_out * head.w2.transpose()).cwiseProduct((P.array() > 0.0).cast<double>().matrix());
    head.w2 -= cfg.learning_rate * (H.transpose() * g_out);
    head.b2 -= cfg.learning_rate * g_out.sum();
    head.W1 -= cfg.learning_rate * (G_hidden.transpose() * F);
    head.b1 -= cfg.learning_rate * G_hidden.colwise().sum().transpose();
  }
  return head;
}

std::string run_dir_name(std::size_t index, const GridPoint& p, std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "run%03zu_gamma%g_alpha%g_seed%llu", index, p.gamma, p.alpha,
                static_cast<unsigned long long>(seed));
  return buf;
}

nlohmann::json run_manifest(const RunResult& r) {
  nlohmann::json j = {{"gamma", r.point.gamma},
                      {"alpha", r.point.alpha},
                      {"seed", r.seed},
                      {"dir", r.dir},
                      {"diverged", r.diverged}};
  if (r.diverged) {
    j["error"] = r.error;
    return j;
  }
  j["last_step"] = r.last_step;
  j["initial_loss"] = r.initial_loss;
  j["final_loss"] = r.final_loss;
  j["final_max_displacement"] = r.final_max_displacement;
  j["final_ntg_change"] = r.final_ntg_change;
  j["initial_min_eig"] = r.initial_min_eig;
  j["min_min_eig"] = r.min_min_eig;
  return j;
}

RunResult execute_run(const ExperimentPlan& plan, std::size_t index, const GridPoint& point,
                      std::uint64_t seed) {
  namespace fs = std::filesystem;
  RunResult res;
  res.point = point;
  res.seed = seed;
  res.dir = run_dir_name(index, point, seed);
  const fs::path dir = fs::path(plan.out_dir) / res.dir;
  fs::create_directories(dir);

  const auto total = static_cast<std::size_t>(std::llround(static_cast<double>(plan.n) / 0.4));
  const Dataset data = synth_dataset(total, plan.d, plan.noise_sd, Rng(seed, kDataStream));
  const DataSplit parts = split(data, {0.4, 0.2, 0.4}, Rng(seed, kSplitStream));
  const ScalingScheme scheme = ScalingScheme::zipf(point.gamma, point.alpha, plan.m);
  const LambdaVector lambdas = compute_lambdas(scheme);
  Network net = init_network(plan.d, plan.m, plan.activation, Rng(seed, kInitStream));
  net.seed = seed;

  nlohmann::json config = plan_to_json(plan);
  config.erase("grid");
  config.erase("seeds");
  config.erase("out_dir");
  config.erase("jobs");
  config["gamma"] = point.gamma;
  config["alpha"] = point.alpha;
  config["seed"] = seed;
  config["scheme"] = scheme_to_json(scheme);
  config["rng"] = {{"algorithm", kRngName},
                   {"data_stream", kDataStream},
                   {"split_stream", kSplitStream},
                   {"init_stream", kInitStream},
                   {"transfer_stream", kTransferStream}};
  config["rows"] = {{"drawn", total},
                    {"train", parts.train.n()},
                    {"test", parts.test.n()},
                    {"validation", parts.validation.n()}};
  write_text_file((dir / "config.json").string(), config.dump(1) + "\n");

  TrainConfig tc = plan.train;
  tc.track_ntg = true;
  try {
    const TrainTrace trace = train(net, lambdas, parts.train.X, parts.train.Y, tc);
    write_text_file((dir / "trace.csv").string(), trace_csv(trace));
    write_text_file((dir / "displacements.csv").string(), displacements_csv(trace));
    res.last_step = trace.last_step;
    res.initial_loss = trace.losses.front();
    res.final_loss = trace.losses.back();
    res.final_max_displacement = trace.weight_displacements.back().maxCoeff();
    res.final_ntg_change = trace.ntg_changes.back();
    res.initial_min_eig = trace.min_eigs.front();
    res.min_min_eig = *std::min_element(trace.min_eigs.begin(), trace.min_eigs.end());

    const auto counts = plan.prune_counts.empty() ? default_prune_counts(plan.m) : plan.prune_counts;
    res.prune = prune_curve(trace.final_network, lambdas, parts.train, parts.test, counts);
    write_text_file((dir / "prune.csv").string(), prune_csv(res.prune));
    if (!plan.transfer_k.empty()) {
      res.transfer = transfer_eval(trace.final_network, lambdas, parts.validation,
                                   plan.transfer_k, plan.head, Rng(seed, kTransferStream));
    }
    write_text_file((dir / "transfer.csv").string(), transfer_csv(res.transfer));
  } catch (const DivergenceError& e) {
    res.diverged = true;
    res.error = e.what();
  }
  nlohmann::json manifest = run_manifest(res);
  manifest["files"] = res.diverged
                          ? nlohmann::json::array({"config.json", "manifest.json"})
                          : nlohmann::json::array({"config.json", "trace.csv", "displacements.csv",
                                                   "prune.csv", "transfer.csv", "manifest.json"});
  write_text_file((dir / "manifest.json").string(), manifest.dump(1) + "\n");
  return res;
}

}  // namespace

Eigen::VectorXd feature_importance(const Network& net, const LambdaVector& lambdas) {
  require(lambdas.size() == net.m, ErrorKind::kShape, "lambda vector length must be m");
  return lambdas.values.cwiseProduct(net.W.rowwise().squaredNorm());
}

std::vector<std::size_t> importance_order(const Eigen::VectorXd& importance) {
  std::vector<std::size_t> order(static_cast<std::size_t>(importance.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return importance[static_cast<Eigen::Index>(a)] > importance[static_cast<Eigen::Index>(b)];
  });
  return order;
}

std::vector<std::size_t> default_prune_counts(std::size_t m) {
  std::vector<std::size_t> out;
  for (double f : {1.0, 0.75, 0.5, 0.25, 0.1, 0.05, 0.0}) {
    const auto k = static_cast<std::size_t>(std::llround(f * static_cast<double>(m)));
    if (out.empty() || k < out.back()) out.push_back(k);
  }
  return out;
}

PruneCurve prune_curve(const Network& net, const LambdaVector& lambdas, const Dataset& train,
                       const Dataset& test, const std::vector<std::size_t>& kept_counts) {
  require(!kept_counts.empty(), ErrorKind::kConfig, "kept_counts is empty");
  for (std::size_t i = 0; i < kept_counts.size(); ++i) {
    require(kept_counts[i] <= net.m, ErrorKind::kConfig, "kept count exceeds the width");
    require(i == 0 || kept_counts[i] < kept_counts[i - 1], ErrorKind::kConfig,
            "kept_counts must be strictly decreasing");
  }
  const auto order = importance_order(feature_importance(net, lambdas));
  PruneCurve curve;
  for (std::size_t k : kept_counts) {
    const LambdaVector lk = masked(lambdas, order, k);
    curve.kept_counts.push_back(k);
    curve.train_risk.push_back(risk(net, lk, train));
    curve.test_risk.push_back(risk(net, lk, test));
  }
  return curve;
}

TransferResult transfer_eval(const Network& net, const LambdaVector& lambdas,
                             const Dataset& heldout, const std::vector<std::size_t>& top_k,
                             const HeadConfig& head, const Rng& rng) {
  require(heldout.n() >= 2, ErrorKind::kConfig, "transfer needs at least two heldout rows");
  require(head.hidden >= 1 && head.learning_rate > 0.0, ErrorKind::kConfig,
          "head needs hidden >= 1 and a positive learning rate");
  for (std::size_t k : top_k) {
    require(k <= net.m, ErrorKind::kConfig,
            "top-k " + std::to_string(k) + " exceeds the width " + std::to_string(net.m));
  }
  Rng split_gen = rng.substream(0);
  const auto perm = permutation(heldout.n(), split_gen);
  const std::size_t n_train = (heldout.n() + 1) / 2;
  const Dataset head_train = subset(heldout, {perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train)}, "head-train");
  const Dataset head_test = subset(heldout, {perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end()}, "head-test");
  const Eigen::VectorXd y_train = head_train.Y.col(0);
  const Eigen::VectorXd y_test = head_test.Y.col(0);

  const auto order = importance_order(feature_importance(net, lambdas));
  const Eigen::MatrixXd f_train = hidden_features(net, lambdas, head_train.X, head.features);
  const Eigen::MatrixXd f_test = hidden_features(net, lambdas, head_test.X, head.features);

  TransferResult out;
  for (std::size_t idx = 0; idx < top_k.size(); ++idx) {
    const std::size_t k = top_k[idx];
    out.k.push_back(k);
    if (k == 0) {
      const double mean = y_train.mean();
      out.head_train_mse.push_back(mse(Eigen::VectorXd::Constant(y_train.size(), mean), y_train));
      out.head_test_mse.push_back(mse(Eigen::VectorXd::Constant(y_test.size(), mean), y_test));
      continue;
    }
    Eigen::MatrixXd a(f_train.rows(), static_cast<Eigen::Index>(k));
    Eigen::MatrixXd b(f_test.rows(), static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c) {
      a.col(static_cast<Eigen::Index>(c)) = f_train.col(static_cast<Eigen::Index>(order[c]));
      b.col(static_cast<Eigen::Index>(c)) = f_test.col(static_cast<Eigen::Index>(order[c]));
    }
    Rng gen = rng.substream(1 + idx);
    const Head fitted = train_head(a, y_train, head, gen);
    out.head_train_mse.push_back(mse(fitted.predict(a), y_train));
    out.head_test_mse.push_back(mse(fitted.predict(b), y_test));
  }
  return out;
}

void ExperimentPlan::validate() const {
  require(!grid.empty(), ErrorKind::kConfig, "experiment grid is empty");
  require(!seeds.empty(), ErrorKind::kConfig, "experiment needs at least one seed");
  require(n >= 1 && d >= 1 && m >= 1, ErrorKind::kConfig, "n, d and m must be positive");
  require(jobs >= 1, ErrorKind::kConfig, "jobs must be positive");
  require(!out_dir.empty(), ErrorKind::kConfig, "out_dir must be set");
  for (const auto& p : grid) ScalingScheme::zipf(p.gamma, p.alpha, m).validate();
  train.validate();
}

std::vector<GridPoint> paper4_grid() { return {{1.0, 0.5}, {0.5, 0.7}, {0.5, 0.5}, {0.0, 0.4}}; }

ExperimentPlan preset_plan(const std::string& scale) {
  ExperimentPlan p;
  p.grid = paper4_grid();
  p.seeds = {1, 2, 3, 4, 5};
  p.train.learning_rate = 1.0;
  p.train.track_ntg = true;
  if (scale == "desk") {
    p.n = 20;
    p.d = 10;
    p.m = 512;
    p.train.steps = 20000;
    p.train.record_every = 200;
    p.transfer_k = {8, 16, 64, 512};
  } else if (scale == "paper") {
    p.n = 100;
    p.d = 50;
    p.m = 2000;
    p.train.steps = 50000;
    p.train.record_every = 500;
    p.transfer_k = {8, 16, 64, 512, 2000};
  } else {
    fail(ErrorKind::kConfig, "unknown scale '" + scale + "' (expected desk or paper)");
  }
  return p;
}

nlohmann::json plan_to_json(const ExperimentPlan& plan) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& p : plan.grid) grid.push_back({{"gamma", p.gamma}, {"alpha", p.alpha}});
  nlohmann::json train = {{"learning_rate", plan.train.learning_rate},
                          {"steps", plan.train.steps},
                          {"record_every", plan.train.record_every}};
  train["loss_floor"] = plan.train.loss_floor ? nlohmann::json(*plan.train.loss_floor)
                                              : nlohmann::json(nullptr);
  return {{"grid", grid},
          {"seeds", plan.seeds},
          {"n", plan.n},
          {"d", plan.d},
          {"m", plan.m},
          {"noise_sd", plan.noise_sd},
          {"activation", std::string(to_string(plan.activation))},
          {"train", train},
          {"prune_counts", plan.prune_counts},
          {"transfer_k", plan.transfer_k},
          {"head",
           {{"hidden", plan.head.hidden},
            {"steps", plan.head.steps},
            {"learning_rate", plan.head.learning_rate},
            {"include_scale", plan.head.features.include_scale},
            {"include_sign", plan.head.features.include_sign}}},
          {"out_dir", plan.out_dir},
          {"jobs", plan.jobs}};
}

ExperimentPlan plan_from_json(const nlohmann::json& j, const ExperimentPlan& base) {
  require(j.is_object(), ErrorKind::kSchema, "plan must be a JSON object");
  ExperimentPlan p = base;
  try {
    if (j.contains("grid")) {
      p.grid.clear();
      for (const auto& g : j.at("grid")) {
        p.grid.push_back({g.at("gamma").get<double>(), g.value("alpha", 0.5)});
      }
    }
    if (j.contains("seeds")) p.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    p.n = j.value("n", p.n);
    p.d = j.value("d", p.d);
    p.m = j.value("m", p.m);
    p.noise_sd = j.value("noise_sd", p.noise_sd);
    if (j.contains("activation")) p.activation = parse_activation(j.at("activation").get<std::string>());
    if (j.contains("train")) {
      const auto& t = j.at("train");
      p.train.learning_rate = t.value("learning_rate", p.train.learning_rate);
      p.train.steps = t.value("steps", p.train.steps);
      p.train.record_every = t.value("record_every", p.train.record_every);
      if (t.contains("loss_floor") && !t.at("loss_floor").is_null()) {
        p.train.loss_floor = t.at("loss_floor").get<double>();
      }
    }
    if (j.contains("prune_counts")) p.prune_counts = j.at("prune_counts").get<std::vector<std::size_t>>();
    if (j.contains("transfer_k")) p.transfer_k = j.at("transfer_k").get<std::vector<std::size_t>>();
    if (j.contains("head")) {
      const auto& h = j.at("head");
      p.head.hidden = h.value("hidden", p.head.hidden);
      p.head.steps = h.value("steps", p.head.steps);
      p.head.learning_rate = h.value("learning_rate", p.head.learning_rate);
      p.head.features.include_scale = h.value("include_scale", p.head.features.include_scale);
      p.head.features.include_sign = h.value("include_sign", p.head.features.include_sign);
    }
    p.out_dir = j.value("out_dir", p.out_dir);
    p.jobs = j.value("jobs", p.jobs);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kSchema, std::string("plan: ") + e.what());
  }
  return p;
}

double median(std::vector<double> v) {
  require(!v.empty(), ErrorKind::kDomain, "median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string prune_csv(const PruneCurve& curve) {
  std::string out = "kept,train_risk,test_risk\n";
  for (std::size_t i = 0; i < curve.kept_counts.size(); ++i) {
    out += std::to_string(curve.kept_counts[i]) + ',' + format_double(curve.train_risk[i]) + ',' +
           format_double(curve.test_risk[i]) + '\n';
  }
  return out;
}

std::string transfer_csv(const TransferResult& result) {
  std::string out = "k,head_train_mse,head_test_mse\n";
  for (std::size_t i = 0; i < result.k.size(); ++i) {
    out += std::to_string(result.k[i]) + ',' + format_double(result.head_train_mse[i]) + ',' +
           format_double(result.head_test_mse[i]) + '\n';
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  std::filesystem::create_directories(plan.out_dir);
  struct Job {
    std::size_t index;
    GridPoint point;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& p : plan.grid) {
    for (auto s : plan.seeds) jobs.push_back({jobs.size(), p, s});
  }
  ExperimentResult result;
  result.runs.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        result.runs[i] = execute_run(plan, jobs[i].index, jobs[i].point, jobs[i].seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(plan.jobs, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : result.runs) {
    result.any_diverged = result.any_diverged || r.diverged;
    runs.push_back(run_manifest(r));
  }
  nlohmann::json summaries = nlohmann::json::array();
  for (std::size_t g = 0; g < plan.grid.size(); ++g) {
    GridSummary s;
    s.point = plan.grid[g];
    std::vector<double> disp, change, loss;
    std::vector<std::vector<double>> prune;
    for (std::size_t k = 0; k < plan.seeds.size(); ++k) {
      const RunResult& r = result.runs[g * plan.seeds.size() + k];
      if (r.diverged) continue;
      disp.push_back(r.final_max_displacement);
      change.push_back(r.final_ntg_change);
      loss.push_back(r.final_loss);
      if (prune.empty()) prune.resize(r.prune.train_risk.size());
      for (std::size_t c = 0; c < r.prune.train_risk.size(); ++c) prune[c].push_back(r.prune.train_risk[c]);
    }
    nlohmann::json js = {{"gamma", s.point.gamma}, {"alpha", s.point.alpha}, {"completed_runs", disp.size()}};
    if (!disp.empty()) {
      s.median_final_max_displacement = median(disp);
      s.median_final_ntg_change = median(change);
      s.median_final_loss = median(loss);
      for (auto& col : prune) s.median_prune_train_risk.push_back(median(col));
      js["median_final_max_displacement"] = s.median_final_max_displacement;
      js["median_final_ntg_change"] = s.median_final_ntg_change;
      js["median_final_loss"] = s.median_final_loss;
      js["median_prune_train_risk"] = s.median_prune_train_risk;
    }
    result.summaries.push_back(s);
    summaries.push_back(js);
  }
  nlohmann::json manifest = {{"plan", plan_to_json(plan)},
                             {"rng", kRngName},
                             {"runs", runs},
                             {"summaries", summaries},
                             {"any_diverged", result.any_diverged}};
  manifest["plan"].erase("out_dir");
  manifest["plan"].erase("jobs");
  write_text_file((std::filesystem::path(plan.out_dir) / "manifest.json").string(),
                  manifest.dump(1) + "\n");
  return result;
}

}  // namespace asymnet
