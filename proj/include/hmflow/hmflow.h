/* SPDX-FileCopyrightText: 2026 hmflow contributors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API of the hmflow shared library. All geometry handles are opaque;
 * points travel in their wire encoding:
 *   Euclidean    "c0;c1;..."
 *   metric tree  "edge:offset" (canonical at vertices)
 *   hyperboloid  "x0;x1;x2"
 *   product      "(factor)|(factor)"
 * Functions returning hmf_status set a thread-local message retrievable via
 * hmf_last_error() on failure. Handle constructors return NULL on failure.
 */

#ifndef HMFLOW_H
#define HMFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    HMF_OK = 0,
    HMF_CHECK_FAILED = 2,  /* a configured verification did not pass */
    HMF_CONFIG_ERROR = 3,  /* configuration parse or validation failure */
    HMF_NUMERIC_ERROR = 4, /* non-convergence or singular solve */
    HMF_INVALID_ARGUMENT = 5,
    HMF_IO_ERROR = 6,
} hmf_status;

const char* hmf_version(void);
const char* hmf_last_error(void);

/* ---------------- target spaces ---------------- */

typedef struct hmf_space hmf_space;

hmf_space* hmf_space_euclidean(int dim);
hmf_space* hmf_space_tripod(double leg_length);
hmf_space* hmf_space_hyperbolic(void);
hmf_space* hmf_space_tree(const char* const* vertices, size_t n_vertices, const char* const* edge_a,
                          const char* const* edge_b, const double* edge_length, size_t n_edges);
/* l2 product of two spaces; the factors are copied, not consumed */
hmf_space* hmf_space_product2(const hmf_space* a, const hmf_space* b);
void hmf_space_free(hmf_space* space);

hmf_status hmf_distance(const hmf_space* space, const char* p, const char* q, double* out);
hmf_status hmf_geodesic_point(const hmf_space* space, const char* p, const char* q, double t, char* buf,
                              size_t buflen);
hmf_status hmf_weighted_barycenter(const hmf_space* space, const char* const* points,
                                   const double* weights, size_t n, double tol, char* buf, size_t buflen);
hmf_status hmf_project_to_ball(const hmf_space* space, const char* p, const char* center, double radius,
                               char* buf, size_t buflen);
/* residuals of the CN inequality and the four quadrilateral comparisons */
hmf_status hmf_comparison_residuals(const hmf_space* space, const char* P, const char* Q, const char* R,
                                    const char* S, double lambda, double mu, double t, double out[5]);

/* ---------------- domains and map states ---------------- */

typedef struct hmf_domain hmf_domain;
typedef struct hmf_state hmf_state;

/* kind: "interval-dirichlet" | "grid2d-dirichlet" | "cycle" | "torus2d" */
hmf_domain* hmf_domain_build(const char* kind, int n, double length);
void hmf_domain_free(hmf_domain* domain);
int hmf_domain_vertex_count(const hmf_domain* domain);
int hmf_domain_boundary_count(const hmf_domain* domain);
double hmf_domain_spacing(const hmf_domain* domain);

/* points: one encoded point per vertex; psi: one per boundary vertex, or NULL
 * for a free boundary (required to be non-NULL on Dirichlet domains before
 * running the flow) */
hmf_state* hmf_state_create(const hmf_domain* domain, const hmf_space* space, const char* const* points,
                            size_t n_points, const char* const* psi, size_t n_psi);
void hmf_state_free(hmf_state* state);
hmf_status hmf_state_get_point(const hmf_state* state, int vertex, char* buf, size_t buflen);
hmf_status hmf_energy(const hmf_state* state, double* total);
hmf_status hmf_l2_distance(const hmf_state* a, const hmf_state* b, double* out);

/* implicit Euler step: minimizer of E[u]/2 + D^2(u, u0)/(2h) */
hmf_state* hmf_resolvent(const hmf_state* u0, double h, double tol, int max_sweeps);
/* m-fold resolvent composition approximating the flow at time t */
hmf_state* hmf_crandall_liggett(const hmf_state* u0, double t, int m, double tol, int max_sweeps);

/* ---------------- scenario drivers ---------------- */

/* Runs the scenario described by the config file, writing CSV/JSON artifacts
 * into out_dir. On success *summary_json (when non-NULL) receives a malloc'd
 * JSON summary; release it with hmf_string_free. Returns HMF_CHECK_FAILED when
 * the run completed but a configured check did not pass. */
hmf_status hmf_run_scenario(const char* config_path, const char* out_dir, char** summary_json);

/* suite: "cat0" | "flow" | "regularity" | "all" */
hmf_status hmf_verify_suite(const char* suite, uint64_t seed, const char* out_dir, char** summary_json);

/* case_name: "euclidean-heat" | "tree-brute-barycenter" | "grid-hj-closedform";
 * params: whitespace-separated k=v pairs. *path_out (when non-NULL) receives
 * the written CSV path. */
hmf_status hmf_oracle(const char* case_name, const char* params, const char* out_dir, char** path_out);

void hmf_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* HMFLOW_H */
