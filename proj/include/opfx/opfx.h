// Copyright 2026 The opfx Authors
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

#ifndef OPFX_OPFX_H_
#define OPFX_OPFX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OPFX_API __declspec(dllexport)
#else
#define OPFX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns an opfx_status. On failure, opfx_last_error()
 * holds a message for the calling thread until its next failing call.
 * Handles are opaque; each *_free accepts NULL. */
typedef enum opfx_status {
  OPFX_OK = 0,
  OPFX_ERR_ARGUMENT = 1,   /* invalid argument or configuration */
  OPFX_ERR_NOT_FOUND = 2,  /* unknown objective id or index */
  OPFX_ERR_CAP = 3,        /* partition count above the cap */
  OPFX_ERR_IO = 4,
  OPFX_ERR_PARSE = 5,      /* malformed case, library, set, table or manifest */
  OPFX_ERR_MISMATCH = 6,   /* inputs from different networks, changed inputs */
  OPFX_ERR_INFEASIBLE = 7, /* no feasible seed point */
  OPFX_ERR_SOLVER = 8,     /* solver failure under the abort policy */
  OPFX_ERR_INTERNAL = 9
} opfx_status;

OPFX_API const char* opfx_status_name(opfx_status s);
OPFX_API const char* opfx_last_error(void);
OPFX_API const char* opfx_version(void);

/* Copies a string result into buf (NUL-terminated, truncated to cap) and
 * stores the full length without the terminator in *needed when non-NULL.
 * buf may be NULL when cap is 0. */

typedef struct opfx_network opfx_network;
typedef struct opfx_library opfx_library;
typedef struct opfx_exhaustive opfx_exhaustive;
typedef struct opfx_run opfx_run;

/* ---- networks ---- */
OPFX_API opfx_status opfx_network_load(const char* path, opfx_network** out);
OPFX_API opfx_status opfx_network_parse(const char* text, opfx_network** out);
OPFX_API void opfx_network_free(opfx_network* net);
OPFX_API opfx_status opfx_network_counts(const opfx_network* net, size_t* buses,
                                         size_t* generators, size_t* branches);
/* Flat variable count: [v | theta | p_gen | q_gen]. */
OPFX_API size_t opfx_network_dimension(const opfx_network* net);
OPFX_API opfx_status opfx_network_hash(const opfx_network* net, char* buf,
                                       size_t cap, size_t* needed);
OPFX_API opfx_status opfx_network_json(const opfx_network* net, char* buf,
                                       size_t cap, size_t* needed);
/* Number of validation findings; the report lists one per line. */
OPFX_API opfx_status opfx_network_validate(const opfx_network* net,
                                           size_t* findings, char* buf,
                                           size_t cap, size_t* needed);
/* Max violation of the operating constraints at a flat point. */
OPFX_API opfx_status opfx_network_max_violation(const opfx_network* net,
                                                const double* x, size_t len,
                                                double* out);

/* ---- objective catalog ---- */
OPFX_API size_t opfx_catalog_size(void);
OPFX_API opfx_status opfx_catalog_id(size_t index, char* buf, size_t cap,
                                     size_t* needed);
OPFX_API opfx_status opfx_catalog_json(char* buf, size_t cap, size_t* needed);
/* Value (and gradient when grad is non-NULL, length len) of a catalog
 * objective at flat point x against the library. */
OPFX_API opfx_status opfx_objective_evaluate(const char* id,
                                             const opfx_library* lib,
                                             const double* x, size_t len,
                                             double* value, double* grad);

/* ---- solver options ---- */
typedef enum opfx_hessian {
  OPFX_HESSIAN_FINITE_DIFFERENCE = 0,
  OPFX_HESSIAN_DAMPED_BFGS = 1
} opfx_hessian;

typedef struct opfx_solver_options {
  int max_iter;
  double tol;
  double acceptable_tol;
  double constr_viol_tol;
  double stationarity_tol;
  double mu_init;
  int max_restorations;
  opfx_hessian hessian;
} opfx_solver_options;

OPFX_API void opfx_solver_options_init(opfx_solver_options* o);

/* ---- sequential collection ---- */
typedef enum opfx_dnf_policy {
  OPFX_DNF_SKIP_AND_PERTURB = 0,
  OPFX_DNF_ABORT = 1
} opfx_dnf_policy;

typedef struct opfx_collect_options {
  const char* objective_id; /* default "f36" */
  size_t n;
  opfx_dnf_policy dnf_policy;
  double perturbation;
  uint64_t seed;
  opfx_solver_options solver;
} opfx_collect_options;

OPFX_API void opfx_collect_options_init(opfx_collect_options* o);
OPFX_API opfx_status opfx_collect(const opfx_network* net,
                                  const opfx_collect_options* o,
                                  opfx_library** out);

OPFX_API opfx_status opfx_library_load(const char* path, opfx_library** out);
OPFX_API opfx_status opfx_library_save(const opfx_library* lib,
                                       const char* jsonl_path,
                                       const char* csv_path);
OPFX_API void opfx_library_free(opfx_library* lib);
OPFX_API size_t opfx_library_size(const opfx_library* lib);
/* Collection steps that ended as DNF; stored in the library file. */
OPFX_API size_t opfx_library_dnf_count(const opfx_library* lib);
OPFX_API size_t opfx_library_dimension(const opfx_library* lib);
OPFX_API opfx_status opfx_library_point(const opfx_library* lib, size_t index,
                                        double* x, size_t len);
OPFX_API opfx_status opfx_library_objective_value(const opfx_library* lib,
                                                  size_t index, double* out);

/* ---- exhaustive sampling ---- */
typedef struct opfx_exhaust_options {
  size_t m;
  size_t t;
  size_t cap;
  unsigned threads;
  double duplicate_tol;
  double perturbation;
  uint64_t seed;
  opfx_solver_options solver;
} opfx_exhaust_options;

OPFX_API void opfx_exhaust_options_init(opfx_exhaust_options* o);
OPFX_API opfx_status opfx_partition_count(const opfx_network* net, size_t m,
                                          size_t cap, size_t* out);
OPFX_API opfx_status opfx_exhaust(const opfx_network* net,
                                  const opfx_exhaust_options* o,
                                  opfx_exhaustive** out);
OPFX_API opfx_status opfx_exhaustive_load(const char* path,
                                          opfx_exhaustive** out);
OPFX_API opfx_status opfx_exhaustive_save(const opfx_exhaustive* xe,
                                          const char* jsonl_path,
                                          const char* report_csv_path);
OPFX_API void opfx_exhaustive_free(opfx_exhaustive* xe);
OPFX_API size_t opfx_exhaustive_size(const opfx_exhaustive* xe);
OPFX_API size_t opfx_exhaustive_partitions(const opfx_exhaustive* xe);
OPFX_API double opfx_exhaustive_feasible_fraction(const opfx_exhaustive* xe);
OPFX_API opfx_status opfx_exhaustive_point(const opfx_exhaustive* xe,
                                           size_t index, double* x,
                                           size_t len);

/* ---- set metrics ---- */
typedef enum opfx_norm {
  OPFX_NORM_P = 0,
  OPFX_NORM_Q,
  OPFX_NORM_V,
  OPFX_NORM_THETA,
  OPFX_NORM_PQ,
  OPFX_NORM_PV,
  OPFX_NORM_VTHETA
} opfx_norm;

typedef enum opfx_injections {
  OPFX_INJECTIONS_GENERATORS = 0,
  OPFX_INJECTIONS_ALL_BUSES = 1
} opfx_injections;

OPFX_API opfx_status opfx_norm_parse(const char* name, opfx_norm* out);

/* Point sets are row-major (count x dim). */
OPFX_API opfx_status opfx_directed_hausdorff(const double* a, size_t na,
                                             const double* b, size_t nb,
                                             size_t dim, double* out);
OPFX_API opfx_status opfx_hausdorff(const double* a, size_t na,
                                    const double* b, size_t nb, size_t dim,
                                    double* out);
/* net may be NULL unless injections is OPFX_INJECTIONS_ALL_BUSES. */
OPFX_API opfx_status opfx_library_hausdorff(const opfx_library* lib,
                                            const opfx_exhaustive* xe,
                                            const opfx_network* net,
                                            opfx_norm norm,
                                            opfx_injections injections,
                                            double* out);
/* Writes min(len, library size) values of H(S_1..i, Xe) and of the
 * directed H*(Xe -> S_1..i); either output may be NULL. */
OPFX_API opfx_status opfx_progression(const opfx_library* lib,
                                      const opfx_exhaustive* xe,
                                      const opfx_network* net, opfx_norm norm,
                                      opfx_injections injections,
                                      double* h, double* h_directed,
                                      size_t len);

/* ---- manifest-backed runs ---- */
OPFX_API opfx_status opfx_run_collect(const char* case_path,
                                      const opfx_collect_options* o,
                                      const char* out_dir, const char* name,
                                      opfx_run** out);
OPFX_API opfx_status opfx_run_exhaust(const char* case_path,
                                      const opfx_exhaust_options* o,
                                      const char* out_dir, const char* name,
                                      opfx_run** out);
/* case_path may be NULL; system may be NULL for the network name. */
OPFX_API opfx_status opfx_run_compare(const char* const* libraries,
                                      size_t n_libraries,
                                      const char* exhaustive_path,
                                      const opfx_norm* norms, size_t n_norms,
                                      opfx_injections injections,
                                      const char* case_path,
                                      const char* system, const char* out_dir,
                                      const char* name, opfx_run** out);
OPFX_API opfx_status opfx_run_score(const char* const* tables, size_t n_tables,
                                    const char* out_dir, const char* name,
                                    opfx_run** out);
/* out_dir may be NULL to write next to the manifest. */
OPFX_API opfx_status opfx_run_replay(const char* manifest_path,
                                     const char* out_dir, opfx_run** out);
OPFX_API void opfx_run_free(opfx_run* run);
OPFX_API const char* opfx_run_summary(const opfx_run* run);
OPFX_API const char* opfx_run_manifest_path(const opfx_run* run);
OPFX_API size_t opfx_run_artifact_count(const opfx_run* run);
OPFX_API const char* opfx_run_artifact(const opfx_run* run, size_t index);
/* 1 when more than half the collection steps were DNF, or no partition
 * probed feasible. */
OPFX_API int opfx_run_failed(const opfx_run* run);

#ifdef __cplusplus
}
#endif

#endif /* OPFX_OPFX_H_ */
