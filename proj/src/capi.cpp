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

#include "asymnet/asymnet.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "asymnet/dataset.hpp"
#include "asymnet/eigensolver.hpp"
#include "asymnet/error.hpp"
#include "asymnet/experiments.hpp"
#include "asymnet/kernel.hpp"
#include "asymnet/serialize.hpp"
#include "asymnet/theory.hpp"
#include "asymnet/training.hpp"

struct asym_scheme {
  asymnet::ScalingScheme scheme;
  asymnet::LambdaVector lambdas;
};

struct asym_dataset {
  asymnet::Dataset data;
};

struct asym_network {
  asymnet::Network net;
};

struct asym_trace {
  asymnet::TrainTrace trace;
};

namespace {

using asymnet::ErrorKind;

thread_local std::string last_error;

// Synthetic data uses the same stream id as the experiment runner.
constexpr std::uint64_t kDataStream = 1;

struct ArgError {
  std::string what;
};

void need(bool cond, const char* what) {
  if (!cond) throw ArgError{what};
}

template <typename F>
asym_status guard(F&& body) {
  try {
    body();
    return ASYM_OK;
  } catch (const ArgError& e) {
    last_error = e.what;
    return ASYM_ERR_INVALID_ARGUMENT;
  } catch (const asymnet::Error& e) {
    last_error = e.what();
    return static_cast<asym_status>(static_cast<int>(e.kind()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return ASYM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ASYM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return ASYM_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

asymnet::Activation to_activation(asym_activation act) {
  switch (act) {
    case ASYM_RELU: return asymnet::Activation::kRelu;
    case ASYM_TANH: return asymnet::Activation::kTanh;
    case ASYM_SOFTPLUS: return asymnet::Activation::kSoftplus;
    case ASYM_SIGMOID: return asymnet::Activation::kSigmoid;
    case ASYM_LINEAR: return asymnet::Activation::kLinear;
  }
  throw ArgError{"unknown activation"};
}

asym_activation from_activation(asymnet::Activation act) {
  switch (act) {
    case asymnet::Activation::kRelu: return ASYM_RELU;
    case asymnet::Activation::kTanh: return ASYM_TANH;
    case asymnet::Activation::kSoftplus: return ASYM_SOFTPLUS;
    case asymnet::Activation::kSigmoid: return ASYM_SIGMOID;
    case asymnet::Activation::kLinear: return ASYM_LINEAR;
  }
  return ASYM_RELU;
}

asym_scheme* make_scheme(asymnet::ScalingScheme s) {
  s.validate();
  auto* out = new asym_scheme{s, asymnet::compute_lambdas(s)};
  return out;
}

void copy_matrix(const Eigen::MatrixXd& M, double* out, size_t len) {
  need(len == static_cast<size_t>(M.size()), "buffer length does not match the result size");
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index k = 0; k < M.cols(); ++k) out[i * M.cols() + k] = M(i, k);
  }
}

void check_pair(const asym_network* net, const asym_scheme* scheme) {
  need(net && scheme, "network and scheme handles must not be NULL");
  if (scheme->scheme.m != net->net.m) {
    asymnet::fail(ErrorKind::kShape, "scheme width " + std::to_string(scheme->scheme.m) +
                                         " differs from network width " +
                                         std::to_string(net->net.m));
  }
}

}  // namespace

extern "C" {

const char* asym_version(void) { return "0.1.0"; }

const char* asym_last_error(void) { return last_error.c_str(); }

const char* asym_status_name(asym_status status) {
  switch (status) {
    case ASYM_OK: return "ok";
    case ASYM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ASYM_ERR_INTERNAL: return "internal error";
    default: break;
  }
  if (status >= ASYM_ERR_DOMAIN && status <= ASYM_ERR_IO) {
    return asymnet::to_string(static_cast<ErrorKind>(status));
  }
  return "unknown status";
}

void asym_string_free(char* s) { std::free(s); }

asym_status asym_activation_parse(const char* name, asym_activation* out) {
  return guard([&] {
    need(name && out, "name and out must not be NULL");
    *out = from_activation(asymnet::parse_activation(name));
  });
}

asym_status asym_zeta(double s, double* out) {
  return guard([&] {
    need(out, "out must not be NULL");
    *out = asymnet::zeta(s);
  });
}

asym_status asym_scheme_zipf(double gamma, double alpha, size_t m, asym_scheme** out) {
  return guard([&] {
    need(out, "out must not be NULL");
    *out = make_scheme(asymnet::ScalingScheme::zipf(gamma, alpha, m));
  });
}

asym_status asym_scheme_explicit(double gamma, const double* w, size_t len, size_t m,
                                 asym_scheme** out) {
  return guard([&] {
    need(out && (w || len == 0), "weights and out must not be NULL");
    *out = make_scheme(asymnet::ScalingScheme::explicit_weights(
        gamma, std::vector<double>(w, w + len), m));
  });
}

asym_status asym_scheme_from_json(const char* json, asym_scheme** out) {
  return guard([&] {
    need(json && out, "json and out must not be NULL");
    *out = make_scheme(asymnet::scheme_from_json(asymnet::parse_json(json, "scheme")));
  });
}

asym_status asym_scheme_to_json(const asym_scheme* scheme, char** out) {
  return guard([&] {
    need(scheme && out, "scheme and out must not be NULL");
    *out = dup_string(asymnet::scheme_to_json(scheme->scheme).dump());
  });
}

void asym_scheme_free(asym_scheme* scheme) { delete scheme; }

asym_status asym_scheme_width(const asym_scheme* scheme, size_t* m) {
  return guard([&] {
    need(scheme && m, "scheme and m must not be NULL");
    *m = scheme->scheme.m;
  });
}

asym_status asym_scheme_lambdas(const asym_scheme* scheme, double* values, double* gamma_part,
                                double* asym_part, size_t len) {
  return guard([&] {
    need(scheme && values, "scheme and values must not be NULL");
    const auto& l = scheme->lambdas;
    copy_matrix(l.values, values, len);
    if (gamma_part) copy_matrix(l.gamma_part, gamma_part, len);
    if (asym_part) copy_matrix(l.asym_part, asym_part, len);
  });
}

asym_status asym_scheme_power_sum(const asym_scheme* scheme, double r, double* out) {
  return guard([&] {
    need(scheme && out, "scheme and out must not be NULL");
    *out = asymnet::power_sum(scheme->lambdas, r);
  });
}

asym_status asym_scheme_departure(const asym_scheme* scheme, double* out) {
  return guard([&] {
    need(scheme && out, "scheme and out must not be NULL");
    *out = asymnet::departure_constant(scheme->scheme);
  });
}

asym_status asym_dataset_synthetic(size_t n, size_t d, double noise_sd, uint64_t seed,
                                   asym_dataset** out) {
  return guard([&] {
    need(out, "out must not be NULL");
    *out = new asym_dataset{asymnet::synth_dataset(n, d, noise_sd, asymnet::Rng(seed, kDataStream))};
  });
}

asym_status asym_dataset_from_arrays(const double* X, const double* y, size_t n, size_t d,
                                     asym_dataset** out) {
  return guard([&] {
    need(X && y && out, "X, y and out must not be NULL");
    need(n >= 1 && d >= 1, "n and d must be positive");
    asymnet::Dataset ds;
    ds.name = "arrays";
    ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    ds.Y.resize(static_cast<Eigen::Index>(n), 1);
    for (size_t i = 0; i < n; ++i) {
      for (size_t k = 0; k < d; ++k) {
        ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = X[i * d + k];
      }
      ds.Y(static_cast<Eigen::Index>(i), 0) = y[i];
    }
    asymnet::require(ds.X.allFinite() && ds.Y.allFinite(), ErrorKind::kNumeric,
                     "dataset arrays contain non-finite values");
    *out = new asym_dataset{std::move(ds)};
  });
}

asym_status asym_dataset_load_csv(const char* path, int target_column, asym_dataset** out) {
  return guard([&] {
    need(path && out, "path and out must not be NULL");
    *out = new asym_dataset{asymnet::load_csv(path, target_column)};
  });
}

void asym_dataset_free(asym_dataset* ds) { delete ds; }

asym_status asym_dataset_shape(const asym_dataset* ds, size_t* n, size_t* d) {
  return guard([&] {
    need(ds, "dataset must not be NULL");
    if (n) *n = ds->data.n();
    if (d) *d = ds->data.d();
  });
}

asym_status asym_dataset_copy(const asym_dataset* ds, double* X, size_t x_len, double* y,
                              size_t y_len) {
  return guard([&] {
    need(ds, "dataset must not be NULL");
    if (X) copy_matrix(ds->data.X, X, x_len);
    if (y) copy_matrix(ds->data.Y.col(0), y, y_len);
  });
}

asym_status asym_dataset_normalize(asym_dataset* ds) {
  return guard([&] {
    need(ds, "dataset must not be NULL");
    ds->data = asymnet::normalize(ds->data);
  });
}

asym_status asym_dataset_validate(const asym_dataset* ds, double collinearity_tol, double* C,
                                  size_t* violations, char** message) {
  return guard([&] {
    need(ds, "dataset must not be NULL");
    const auto rep = asymnet::validate_assumptions(ds->data, collinearity_tol);
    if (C) *C = rep.C;
    if (violations) {
      *violations = rep.zero_rows.size() + rep.oversized_rows.size() + rep.collinear_pairs.size();
    }
    if (message) *message = dup_string(rep.describe());
  });
}

asym_status asym_dataset_split(const asym_dataset* ds, const double fractions[3], uint64_t seed,
                               asym_dataset** train, asym_dataset** test,
                               asym_dataset** validation) {
  return guard([&] {
    need(ds && fractions && train && test && validation, "arguments must not be NULL");
    auto parts = asymnet::split(ds->data, {fractions[0], fractions[1], fractions[2]},
                                asymnet::Rng(seed, 2));
    *train = new asym_dataset{std::move(parts.train)};
    *test = new asym_dataset{std::move(parts.test)};
    *validation = new asym_dataset{std::move(parts.validation)};
  });
}

asym_status asym_network_init(size_t d, size_t m, asym_activation act, uint64_t seed,
                              asym_network** out) {
  return guard([&] {
    need(out, "out must not be NULL");
    need(d >= 1 && m >= 1, "d and m must be positive");
    auto net = asymnet::init_network(d, m, to_activation(act), asymnet::Rng(seed, 3));
    net.seed = seed;
    *out = new asym_network{std::move(net)};
  });
}

asym_status asym_network_load(const char* path, asym_network** out) {
  return guard([&] {
    need(path && out, "path and out must not be NULL");
    *out = new asym_network{asymnet::load_network(path)};
  });
}

asym_status asym_network_save(const asym_network* net, const char* path) {
  return guard([&] {
    need(net && path, "network and path must not be NULL");
    asymnet::save_network(net->net, path);
  });
}

void asym_network_free(asym_network* net) { delete net; }

asym_status asym_network_shape(const asym_network* net, size_t* d, size_t* m) {
  return guard([&] {
    need(net, "network must not be NULL");
    if (d) *d = net->net.d;
    if (m) *m = net->net.m;
  });
}

asym_status asym_network_weights(const asym_network* net, double* W, size_t len) {
  return guard([&] {
    need(net && W, "network and W must not be NULL");
    copy_matrix(net->net.W, W, len);
  });
}

asym_status asym_network_set_weights(asym_network* net, const double* W, size_t len) {
  return guard([&] {
    need(net && W, "network and W must not be NULL");
    need(len == net->net.m * net->net.d, "W must have m*d entries");
    Eigen::MatrixXd next = net->net.W;
    for (Eigen::Index j = 0; j < next.rows(); ++j) {
      for (Eigen::Index k = 0; k < next.cols(); ++k) next(j, k) = W[j * next.cols() + k];
    }
    asymnet::require(next.allFinite(), ErrorKind::kNumeric, "weights must be finite");
    net->net.W = std::move(next);
  });
}

asym_status asym_network_forward(const asym_network* net, const asym_scheme* scheme,
                                 const asym_dataset* ds, double* out, size_t len) {
  return guard([&] {
    check_pair(net, scheme);
    need(ds && out, "dataset and out must not be NULL");
    const Eigen::MatrixXd f = asymnet::forward(net->net, scheme->lambdas, ds->data.X);
    copy_matrix(f.col(0), out, len);
  });
}

asym_status asym_network_loss(const asym_network* net, const asym_scheme* scheme,
                              const asym_dataset* ds, double* out) {
  return guard([&] {
    check_pair(net, scheme);
    need(ds && out, "dataset and out must not be NULL");
    *out = asymnet::loss(net->net, scheme->lambdas, ds->data.X, ds->data.Y);
  });
}

void asym_train_config_default(asym_train_config* cfg) {
  if (!cfg) return;
  const asymnet::TrainConfig d;
  cfg->learning_rate = d.learning_rate;
  cfg->steps = d.steps;
  cfg->record_every = d.record_every;
  cfg->loss_floor = -1.0;
  cfg->batch_size = 0;
  cfg->batch_seed = 0;
  cfg->track_ntg = 0;
}

asym_status asym_train(const asym_network* net, const asym_scheme* scheme,
                       const asym_dataset* ds, const asym_train_config* cfg,
                       asym_trace** out) {
  return guard([&] {
    check_pair(net, scheme);
    need(ds && cfg && out, "dataset, config and out must not be NULL");
    asymnet::TrainConfig tc;
    tc.learning_rate = cfg->learning_rate;
    tc.steps = cfg->steps;
    tc.record_every = cfg->record_every;
    if (cfg->loss_floor >= 0.0) tc.loss_floor = cfg->loss_floor;
    tc.batch_size = cfg->batch_size;
    tc.batch_seed = cfg->batch_seed;
    tc.track_ntg = cfg->track_ntg != 0;
    *out = new asym_trace{
        asymnet::train(net->net, scheme->lambdas, ds->data.X, ds->data.Y, tc)};
  });
}

void asym_trace_free(asym_trace* trace) { delete trace; }

asym_status asym_trace_records(const asym_trace* trace, size_t* count) {
  return guard([&] {
    need(trace && count, "trace and count must not be NULL");
    *count = trace->trace.records();
  });
}

asym_status asym_trace_get(const asym_trace* trace, size_t record, size_t* step, double* loss,
                           double* min_eig, double* ntg_change, double* max_displacement) {
  return guard([&] {
    need(trace, "trace must not be NULL");
    const auto& t = trace->trace;
    need(record < t.records(), "record index out of range");
    const bool ntg = t.min_eigs.size() == t.records();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (step) *step = t.steps[record];
    if (loss) *loss = t.losses[record];
    if (min_eig) *min_eig = ntg ? t.min_eigs[record] : nan;
    if (ntg_change) *ntg_change = ntg ? t.ntg_changes[record] : nan;
    if (max_displacement) {
      const auto& v = t.weight_displacements[record];
      *max_displacement = v.size() ? v.maxCoeff() : 0.0;
    }
  });
}

asym_status asym_trace_write_csv(const asym_trace* trace, const char* trace_path,
                                 const char* displacements_path) {
  return guard([&] {
    need(trace && trace_path, "trace and trace_path must not be NULL");
    asymnet::write_text_file(trace_path, asymnet::trace_csv(trace->trace));
    if (displacements_path) {
      asymnet::write_text_file(displacements_path, asymnet::displacements_csv(trace->trace));
    }
  });
}

asym_status asym_trace_final_network(const asym_trace* trace, asym_network** out) {
  return guard([&] {
    need(trace && out, "trace and out must not be NULL");
    *out = new asym_network{trace->trace.final_network};
  });
}

asym_status asym_ntg(const asym_network* net, const asym_scheme* scheme, const asym_dataset* ds,
                     double* values, double* part1, double* part2, size_t len) {
  return guard([&] {
    check_pair(net, scheme);
    need(ds && values, "dataset and values must not be NULL");
    const auto g = asymnet::ntg(net->net, scheme->lambdas, ds->data.X);
    copy_matrix(g.values, values, len);
    if (part1) copy_matrix(g.part1, part1, len);
    if (part2) copy_matrix(g.part2, part2, len);
  });
}

asym_status asym_ntg_write_csv(const asym_network* net, const asym_scheme* scheme,
                               const asym_dataset* ds, size_t step, const char* path) {
  return guard([&] {
    check_pair(net, scheme);
    need(ds && path, "dataset and path must not be NULL");
    const auto g = asymnet::ntg(net->net, scheme->lambdas, ds->data.X);
    asymnet::write_ntg_csv(g.values, {ds->data.n(), net->net.m, scheme->scheme.gamma, step},
                           path);
  });
}

asym_status asym_ntg_spectrum(const asym_network* net, const asym_scheme* scheme,
                              const asym_dataset* ds, double* min_eig, double* max_eig,
                              double* trace) {
  return guard([&] {
    check_pair(net, scheme);
    need(ds, "dataset must not be NULL");
    const auto s = asymnet::spectral_summary(asymnet::ntg_values(net->net, scheme->lambdas, ds->data.X));
    if (min_eig) *min_eig = s.min_eig;
    if (max_eig) *max_eig = s.max_eig;
    if (trace) *trace = s.trace;
  });
}

asym_status asym_kappa_n(const asym_dataset* ds, asym_activation act, size_t samples,
                         uint64_t seed, double* value, double* half_width) {
  return guard([&] {
    need(ds && value, "dataset and value must not be NULL");
    const auto k = asymnet::kappa_n(ds->data.X, to_activation(act), samples, asymnet::Rng(seed));
    *value = k.value;
    if (half_width) *half_width = k.half_width;
  });
}

asym_status asym_feature_importance(const asym_network* net, const asym_scheme* scheme,
                                    double* out, size_t len) {
  return guard([&] {
    check_pair(net, scheme);
    need(out, "out must not be NULL");
    copy_matrix(asymnet::feature_importance(net->net, scheme->lambdas), out, len);
  });
}

asym_status asym_prune_curve(const asym_network* net, const asym_scheme* scheme,
                             const asym_dataset* train, const asym_dataset* test,
                             const size_t* kept, size_t len, double* train_risk,
                             double* test_risk) {
  return guard([&] {
    check_pair(net, scheme);
    need(train && test && kept && train_risk && test_risk, "arguments must not be NULL");
    const auto curve = asymnet::prune_curve(net->net, scheme->lambdas, train->data, test->data,
                                            std::vector<std::size_t>(kept, kept + len));
    for (size_t i = 0; i < len; ++i) {
      train_risk[i] = curve.train_risk[i];
      test_risk[i] = curve.test_risk[i];
    }
  });
}

void asym_head_config_default(asym_head_config* cfg) {
  if (!cfg) return;
  const asymnet::HeadConfig d;
  cfg->hidden = d.hidden;
  cfg->steps = d.steps;
  cfg->learning_rate = d.learning_rate;
  cfg->include_scale = d.features.include_scale ? 1 : 0;
  cfg->include_sign = d.features.include_sign ? 1 : 0;
}

asym_status asym_transfer_eval(const asym_network* net, const asym_scheme* scheme,
                               const asym_dataset* heldout, const size_t* k, size_t len,
                               const asym_head_config* head_config, uint64_t seed,
                               double* head_train_mse, double* head_test_mse) {
  return guard([&] {
    check_pair(net, scheme);
    need(heldout && k && head_test_mse, "arguments must not be NULL");
    asymnet::HeadConfig head;
    if (head_config) {
      head.hidden = head_config->hidden;
      head.steps = head_config->steps;
      head.learning_rate = head_config->learning_rate;
      head.features.include_scale = head_config->include_scale != 0;
      head.features.include_sign = head_config->include_sign != 0;
    }
    const auto res = asymnet::transfer_eval(net->net, scheme->lambdas, heldout->data,
                                            std::vector<std::size_t>(k, k + len), head,
                                            asymnet::Rng(seed, 4));
    for (size_t i = 0; i < len; ++i) {
      head_test_mse[i] = res.head_test_mse[i];
      if (head_train_mse) head_train_mse[i] = res.head_train_mse[i];
    }
  });
}

asym_status asym_preset_plan(const char* scale, char** out_json) {
  return guard([&] {
    need(scale && out_json, "scale and out_json must not be NULL");
    *out_json = dup_string(asymnet::plan_to_json(asymnet::preset_plan(scale)).dump(1));
  });
}

asym_status asym_run_experiment(const char* plan_json, int* any_diverged, char** summary_json) {
  return guard([&] {
    need(plan_json, "plan_json must not be NULL");
    const auto plan = asymnet::plan_from_json(asymnet::parse_json(plan_json, "plan"));
    const auto result = asymnet::run_experiment(plan);
    if (any_diverged) *any_diverged = result.any_diverged ? 1 : 0;
    if (summary_json) {
      *summary_json = dup_string(asymnet::read_text_file(plan.out_dir + "/manifest.json"));
    }
  });
}

asym_status asym_theory_report(const asym_dataset* ds, const asym_scheme* scheme,
                               asym_activation act, const char* options_json, uint64_t seed,
                               char** out_json) {
  return guard([&] {
    need(ds && scheme && out_json, "dataset, scheme and out_json must not be NULL");
    asymnet::TheoryOptions opt;
    if (options_json) {
      const auto j = asymnet::parse_json(options_json, "theory options");
      asymnet::require(j.is_object(), ErrorKind::kSchema, "theory options must be an object");
      try {
        opt.kappa_samples = j.value("kappa_samples", opt.kappa_samples);
        opt.c0_samples = j.value("c0_samples", opt.c0_samples);
        opt.c1_samples = j.value("c1_samples", opt.c1_samples);
        opt.g_samples = j.value("g_samples", opt.g_samples);
        opt.mc_replications = j.value("mc_replications", opt.mc_replications);
        opt.fd_learning_rate = j.value("fd_learning_rate", opt.fd_learning_rate);
        opt.delta = j.value("delta", opt.delta);
        opt.max_table_rows = j.value("max_table_rows", opt.max_table_rows);
        opt.include_tables = j.value("include_tables", opt.include_tables);
      } catch (const nlohmann::json::exception& e) {
        asymnet::fail(ErrorKind::kSchema, std::string("theory options: ") + e.what());
      }
    }
    const auto rep = asymnet::build_theory_report(ds->data.X, ds->data.Y, scheme->scheme,
                                                  to_activation(act), opt, asymnet::Rng(seed));
    *out_json = dup_string(asymnet::theory_report_to_json(rep).dump(1));
  });
}

}  // extern "C"
