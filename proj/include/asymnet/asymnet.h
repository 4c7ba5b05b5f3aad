/*
 * Copyright 2026 The asymnet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of libasymnet.
 *
 * Objects are opaque handles created by asym_*_create / load functions and
 * released with the matching asym_*_free (NULL is accepted). Every fallible
 * call returns an asym_status; on failure the message is available from
 * asym_last_error() on the calling thread until the next failing call.
 * Strings returned through char** are owned by the caller and released with
 * asym_string_free. Matrices are dense, row-major, float64.
 */

#ifndef ASYMNET_ASYMNET_H
#define ASYMNET_ASYMNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(ASYMNET_BUILDING_LIBRARY)
#define ASYM_API __attribute__((visibility("default")))
#else
#define ASYM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum asym_status {
  ASYM_OK = 0,
  ASYM_ERR_DOMAIN = 1,
  ASYM_ERR_SHAPE = 2,
  ASYM_ERR_NUMERIC = 3,
  ASYM_ERR_DIVERGENCE = 4,
  ASYM_ERR_PARSE = 5,
  ASYM_ERR_SCHEMA = 6,
  ASYM_ERR_ASSUMPTION = 7,
  ASYM_ERR_CONFIG = 8,
  ASYM_ERR_IO = 9,
  ASYM_ERR_INVALID_ARGUMENT = 64, /* NULL handle / pointer, bad buffer length */
  ASYM_ERR_INTERNAL = 65
} asym_status;

typedef enum asym_activation {
  ASYM_RELU = 0,
  ASYM_TANH = 1,
  ASYM_SOFTPLUS = 2,
  ASYM_SIGMOID = 3,
  ASYM_LINEAR = 4
} asym_activation;

typedef struct asym_scheme asym_scheme;
typedef struct asym_dataset asym_dataset;
typedef struct asym_network asym_network;
typedef struct asym_trace asym_trace;

ASYM_API const char* asym_version(void);
ASYM_API const char* asym_last_error(void);
ASYM_API const char* asym_status_name(asym_status status);
ASYM_API void asym_string_free(char* s);

ASYM_API asym_status asym_activation_parse(const char* name, asym_activation* out);

/* ---- scaling ---- */

ASYM_API asym_status asym_zeta(double s, double* out);

ASYM_API asym_status asym_scheme_zipf(double gamma, double alpha, size_t m, asym_scheme** out);
/* Tilde weights w[0..len), nonincreasing, summing to 1; zero-padded to m. */
ASYM_API asym_status asym_scheme_explicit(double gamma, const double* w, size_t len, size_t m,
                                          asym_scheme** out);
/* {gamma, source: {kind: "zipf"|"explicit", alpha|weights}, m} */
ASYM_API asym_status asym_scheme_from_json(const char* json, asym_scheme** out);
ASYM_API asym_status asym_scheme_to_json(const asym_scheme* scheme, char** out);
ASYM_API void asym_scheme_free(asym_scheme* scheme);

ASYM_API asym_status asym_scheme_width(const asym_scheme* scheme, size_t* m);
/* len must equal m; gamma_part and asym_part may be NULL. */
ASYM_API asym_status asym_scheme_lambdas(const asym_scheme* scheme, double* values,
                                         double* gamma_part, double* asym_part, size_t len);
ASYM_API asym_status asym_scheme_power_sum(const asym_scheme* scheme, double r, double* out);
ASYM_API asym_status asym_scheme_departure(const asym_scheme* scheme, double* out);

/* ---- datasets ---- */

ASYM_API asym_status asym_dataset_synthetic(size_t n, size_t d, double noise_sd, uint64_t seed,
                                            asym_dataset** out);
/* X is n x d row-major, y has n entries. */
ASYM_API asym_status asym_dataset_from_arrays(const double* X, const double* y, size_t n,
                                              size_t d, asym_dataset** out);
/* target_column is 0-based; negative counts from the end. */
ASYM_API asym_status asym_dataset_load_csv(const char* path, int target_column,
                                           asym_dataset** out);
ASYM_API void asym_dataset_free(asym_dataset* ds);

ASYM_API asym_status asym_dataset_shape(const asym_dataset* ds, size_t* n, size_t* d);
ASYM_API asym_status asym_dataset_copy(const asym_dataset* ds, double* X, size_t x_len,
                                       double* y, size_t y_len);
/* In place: rows divided by the largest row norm. */
ASYM_API asym_status asym_dataset_normalize(asym_dataset* ds);
/* violations counts zero rows, rows of norm above 1 and parallel pairs;
 * message (may be NULL) receives one line per violation. */
ASYM_API asym_status asym_dataset_validate(const asym_dataset* ds, double collinearity_tol,
                                           double* C, size_t* violations, char** message);
ASYM_API asym_status asym_dataset_split(const asym_dataset* ds, const double fractions[3],
                                        uint64_t seed, asym_dataset** train, asym_dataset** test,
                                        asym_dataset** validation);

/* ---- networks ---- */

ASYM_API asym_status asym_network_init(size_t d, size_t m, asym_activation act, uint64_t seed,
                                       asym_network** out);
ASYM_API asym_status asym_network_load(const char* path, asym_network** out);
ASYM_API asym_status asym_network_save(const asym_network* net, const char* path);
ASYM_API void asym_network_free(asym_network* net);

ASYM_API asym_status asym_network_shape(const asym_network* net, size_t* d, size_t* m);
/* W is m x d row-major. */
ASYM_API asym_status asym_network_weights(const asym_network* net, double* W, size_t len);
ASYM_API asym_status asym_network_set_weights(asym_network* net, const double* W, size_t len);
/* out has n entries (first output column). */
ASYM_API asym_status asym_network_forward(const asym_network* net, const asym_scheme* scheme,
                                          const asym_dataset* ds, double* out, size_t len);
ASYM_API asym_status asym_network_loss(const asym_network* net, const asym_scheme* scheme,
                                       const asym_dataset* ds, double* out);

/* ---- training ---- */

typedef struct asym_train_config {
  double learning_rate;
  size_t steps;
  size_t record_every;
  double loss_floor; /* negative: 1e-10 times the initial loss */
  size_t batch_size; /* 0: full batch */
  uint64_t batch_seed;
  int track_ntg;
} asym_train_config;

ASYM_API void asym_train_config_default(asym_train_config* cfg);
ASYM_API asym_status asym_train(const asym_network* net, const asym_scheme* scheme,
                                const asym_dataset* ds, const asym_train_config* cfg,
                                asym_trace** out);
ASYM_API void asym_trace_free(asym_trace* trace);

ASYM_API asym_status asym_trace_records(const asym_trace* trace, size_t* count);
/* min_eig and ntg_change are NaN when the NTG was not tracked. Any output may be NULL. */
ASYM_API asym_status asym_trace_get(const asym_trace* trace, size_t record, size_t* step,
                                    double* loss, double* min_eig, double* ntg_change,
                                    double* max_displacement);
/* displacements_path may be NULL. */
ASYM_API asym_status asym_trace_write_csv(const asym_trace* trace, const char* trace_path,
                                          const char* displacements_path);
ASYM_API asym_status asym_trace_final_network(const asym_trace* trace, asym_network** out);

/* ---- kernel ---- */

/* Buffers are n x n; part1 / part2 may be NULL. */
ASYM_API asym_status asym_ntg(const asym_network* net, const asym_scheme* scheme,
                              const asym_dataset* ds, double* values, double* part1,
                              double* part2, size_t len);
ASYM_API asym_status asym_ntg_write_csv(const asym_network* net, const asym_scheme* scheme,
                                        const asym_dataset* ds, size_t step, const char* path);
ASYM_API asym_status asym_ntg_spectrum(const asym_network* net, const asym_scheme* scheme,
                                       const asym_dataset* ds, double* min_eig, double* max_eig,
                                       double* trace);
ASYM_API asym_status asym_kappa_n(const asym_dataset* ds, asym_activation act, size_t samples,
                                  uint64_t seed, double* value, double* half_width);

/* ---- experiments ---- */

ASYM_API asym_status asym_feature_importance(const asym_network* net, const asym_scheme* scheme,
                                             double* out, size_t len);
/* kept strictly decreasing, each <= m; risk buffers have len entries. */
ASYM_API asym_status asym_prune_curve(const asym_network* net, const asym_scheme* scheme,
                                      const asym_dataset* train, const asym_dataset* test,
                                      const size_t* kept, size_t len, double* train_risk,
                                      double* test_risk);

typedef struct asym_head_config {
  size_t hidden;
  size_t steps;
  double learning_rate;
  int include_scale;
  int include_sign;
} asym_head_config;

ASYM_API void asym_head_config_default(asym_head_config* cfg);
/* head_config may be NULL (defaults). head_train_mse may be NULL. */
ASYM_API asym_status asym_transfer_eval(const asym_network* net, const asym_scheme* scheme,
                                        const asym_dataset* heldout, const size_t* k, size_t len,
                                        const asym_head_config* head_config, uint64_t seed,
                                        double* head_train_mse, double* head_test_mse);

/* Plan JSON for scale "desk" or "paper". */
ASYM_API asym_status asym_preset_plan(const char* scale, char** out_json);
/* Runs a plan (JSON; out_dir required). summary_json (may be NULL) receives
 * the top-level manifest. *any_diverged is set even when some runs diverged. */
ASYM_API asym_status asym_run_experiment(const char* plan_json, int* any_diverged,
                                         char** summary_json);

/* Theory report JSON for a dataset and scheme. options_json may be NULL;
 * recognised keys: kappa_samples, c0_samples, c1_samples, g_samples,
 * mc_replications, fd_learning_rate, delta, max_table_rows, include_tables. */
ASYM_API asym_status asym_theory_report(const asym_dataset* ds, const asym_scheme* scheme,
                                        asym_activation act, const char* options_json,
                                        uint64_t seed, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* ASYMNET_ASYMNET_H */
