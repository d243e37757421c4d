/* Copyright 2026 The crmod Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to crmod: Heisenberg geometry, lattice quotients, contact-map
 * dilatation and the discrete 4-modulus solver. All handles are opaque; every
 * fallible call returns a crmod_status and leaves a message retrievable with
 * crmod_last_error() on the calling thread.
 */
#ifndef CRMOD_CRMOD_H
#define CRMOD_CRMOD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32) || defined(__CYGWIN__)
#  ifdef CRMOD_BUILDING
#    define CRMOD_API __declspec(dllexport)
#  else
#    define CRMOD_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__) && __GNUC__ >= 4
#  define CRMOD_API __attribute__((visibility("default")))
#else
#  define CRMOD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum crmod_status {
  CRMOD_OK = 0,
  CRMOD_INVALID_ARGUMENT = 1,
  CRMOD_NON_LEGENDRIAN = 2,
  CRMOD_OUT_OF_DOMAIN = 3,
  CRMOD_BUDGET_EXHAUSTED = 4,
  CRMOD_NOT_CONTACT = 5,
  CRMOD_DEGENERATE = 6,
  CRMOD_ORIENTATION_REVERSED = 7,
  CRMOD_INFEASIBLE = 8,
  CRMOD_NOT_CONVERGED = 9, /* the result handle, if requested, still holds the best pair */
  CRMOD_IO = 10,
  CRMOD_PARSE = 11,
  CRMOD_INTERNAL = 12
} crmod_status;

typedef struct crmod_point {
  double x, y, t;
} crmod_point;

typedef struct crmod_lattice crmod_lattice;
typedef struct crmod_family crmod_family;
typedef struct crmod_result crmod_result;
typedef struct crmod_map crmod_map;

CRMOD_API const char* crmod_version(void);
CRMOD_API const char* crmod_status_string(crmod_status s);
/* Message of the last failed call on this thread; "" after a success. */
CRMOD_API const char* crmod_last_error(void);

/* ---- group and metric ---- */
CRMOD_API crmod_point crmod_group_mul(crmod_point p, crmod_point q);
CRMOD_API crmod_point crmod_group_inv(crmod_point p);
CRMOD_API crmod_status crmod_cc_distance(crmod_point p, crmod_point q, double* out);
CRMOD_API crmod_status crmod_cc_distance_scaled(double K, crmod_point p, crmod_point q,
                                                double* out);

typedef struct crmod_oracle_budget {
  int steps;
  int restarts;
  int max_sweeps;
  double initial_step;
  double min_step;
  double endpoint_tol;
  uint64_t seed;
} crmod_oracle_budget;

CRMOD_API crmod_oracle_budget crmod_oracle_default_budget(void);
/* budget may be NULL for the defaults. */
CRMOD_API crmod_status crmod_brute_force_distance(crmod_point p, crmod_point q,
                                                  const crmod_oracle_budget* budget, double* out);

/* Writes up to n samples of the minimizing arc-lift into path (may be NULL). */
CRMOD_API crmod_status crmod_geodesic(crmod_point p, crmod_point q, int n, crmod_point* path,
                                      double* length, double* turning_angle);

/* ---- lattice ---- */
CRMOD_API crmod_status crmod_lattice_create(double sigma, double tau, crmod_lattice** out);
CRMOD_API void crmod_lattice_destroy(crmod_lattice* lat);
CRMOD_API double crmod_lattice_volume(const crmod_lattice* lat);
CRMOD_API int64_t crmod_lattice_commutator_power(const crmod_lattice* lat);
/* word = {n1, n2, m} with act(word, rep) = p. */
CRMOD_API crmod_status crmod_lattice_reduce(const crmod_lattice* lat, crmod_point p,
                                            crmod_point* rep, int64_t word[3]);
CRMOD_API crmod_status crmod_lattice_act(const crmod_lattice* lat, const int64_t word[3],
                                         crmod_point p, crmod_point* out);
CRMOD_API crmod_status crmod_quotient_distance(const crmod_lattice* lat, crmod_point p,
                                               crmod_point q, int radius, double* out,
                                               int64_t word[3], int* touches_boundary);
CRMOD_API crmod_status crmod_homotopy_min_length(const crmod_lattice* lat, crmod_point p,
                                                 crmod_point q, const int64_t cls[3], double K,
                                                 double* out);

/* ---- curve families ---- */
CRMOD_API crmod_status crmod_family_x_lines(const crmod_lattice* lat, double a, int m, int n,
                                            crmod_family** out);
CRMOD_API crmod_status crmod_family_create(crmod_family** out);
/* samples: n_samples rows of (param, x, y, t). */
CRMOD_API crmod_status crmod_family_push(const crmod_lattice* lat, crmod_family* fam,
                                         const double* samples, size_t n_samples);
CRMOD_API size_t crmod_family_size(const crmod_family* fam);
CRMOD_API crmod_status crmod_family_save(const crmod_lattice* lat, const crmod_family* fam,
                                         const char* path);
/* Creates both handles from a family file. */
CRMOD_API crmod_status crmod_family_load(const char* path, crmod_lattice** lat,
                                         crmod_family** fam);
CRMOD_API void crmod_family_destroy(crmod_family* fam);

/* ---- modulus ---- */
typedef struct crmod_solve_options {
  int nx, ny, nt;
  double K; /* metric used for curve lengths; 1 is the Levi metric */
  double tol;
  int64_t max_iter;
} crmod_solve_options;

CRMOD_API crmod_solve_options crmod_solve_default_options(void);
CRMOD_API crmod_status crmod_solve_modulus(const crmod_lattice* lat, const crmod_family* fam,
                                           const crmod_solve_options* opts, crmod_result** out);
CRMOD_API double crmod_result_value(const crmod_result* r);
CRMOD_API double crmod_result_dual_bound(const crmod_result* r);
CRMOD_API double crmod_result_gap(const crmod_result* r);
CRMOD_API int64_t crmod_result_iterations(const crmod_result* r);
CRMOD_API size_t crmod_result_density_size(const crmod_result* r);
CRMOD_API const double* crmod_result_density(const crmod_result* r);
CRMOD_API int crmod_result_non_rectifiable(const crmod_result* r);
/* Caller frees *json with crmod_string_free. */
CRMOD_API crmod_status crmod_result_to_json(const crmod_result* r, int with_density, char** json);
CRMOD_API void crmod_result_destroy(crmod_result* r);
CRMOD_API double crmod_analytic_modulus_fibration(double a, double vol);

/* ---- contact maps ---- */
/* names: identity, f0, t-translation, competitor, flow-x, dilation, stretch-t.
 * param is K for f0, the shift for t-translation/flow-x, the factor for
 * dilation; competitor is f0 followed by a t-translation by param2. */
CRMOD_API crmod_status crmod_map_builtin(const char* name, double param, double param2,
                                         crmod_map** out);
/* coeffs: 3x3 row-major matrix then the offset. */
CRMOD_API crmod_status crmod_map_affine(const double coeffs[12], crmod_map** out);
CRMOD_API crmod_status crmod_map_apply(const crmod_map* f, crmod_point p, crmod_point* out);
CRMOD_API void crmod_map_destroy(crmod_map* f);

typedef struct crmod_dilatation_report {
  double lambda1, lambda2, K;
  double jacobian;
  int has_mu;
  double mu_re, mu_im;
  double contact_residual;
} crmod_dilatation_report;

/* Status NOT_CONTACT when the differential leaves the contact plane;
 * analytic = 0 forces finite differences. */
CRMOD_API crmod_status crmod_map_dilatation(const crmod_map* f, crmod_point q, int analytic,
                                            crmod_dilatation_report* out);

/* ---- experiments ---- */
/* config_json may be NULL or "" for the defaults. *record_json is always set
 * on CRMOD_OK; free it with crmod_string_free. */
CRMOD_API crmod_status crmod_experiment_run(const char* command, const char* config_json,
                                            char** record_json);
/* Normalised config (defaults filled in) as JSON. */
CRMOD_API crmod_status crmod_experiment_config(const char* config_json, char** normalized_json);
CRMOD_API void crmod_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* CRMOD_CRMOD_H */
