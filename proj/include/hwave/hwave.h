#ifndef HWAVE_HWAVE_H
#define HWAVE_HWAVE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HWAVE_BUILDING_LIBRARY)
#    define HWAVE_API __declspec(dllexport)
#  else
#    define HWAVE_API __declspec(dllimport)
#  endif
#else
#  define HWAVE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The first four match the wavecli exit codes. */
typedef enum hwave_status {
  HWAVE_OK = 0,
  HWAVE_ERR_DOMAIN = 1,
  HWAVE_ERR_CONFIG = 2,
  HWAVE_ERR_NUMERIC = 3,
  HWAVE_ERR_CERTIFICATE = 4,
  HWAVE_ERR_CONVERGENCE = 5,
  HWAVE_ERR_DOMAIN_ESCAPE = 6,
  HWAVE_ERR_INSTABILITY = 7,
  HWAVE_ERR_ARGUMENT = 8,
  HWAVE_ERR_INTERNAL = 9
} hwave_status;

/* Message of the last failing call on this thread ("" when none). */
HWAVE_API const char* hwave_last_error(void);
HWAVE_API const char* hwave_version(void);
/* Caps internal parallelism; 0 restores the default. */
HWAVE_API void hwave_set_threads(int n);

/* ---- radial profiles ---- */

typedef struct hwave_profile hwave_profile;

HWAVE_API hwave_status hwave_profile_zero(hwave_profile** out);
HWAVE_API hwave_status hwave_profile_constant(double value, hwave_profile** out);
/* (cosh r)^{-k-1/2} */
HWAVE_API hwave_status hwave_profile_theta(double k, hwave_profile** out);
HWAVE_API hwave_status hwave_profile_plateau(double lo, double hi, double ramp, double height,
                                             hwave_profile** out);
/* Samples on an increasing grid; cubic != 0 selects monotone cubic interpolation. */
HWAVE_API hwave_status hwave_profile_sampled(const double* x, const double* y, size_t n,
                                             int cubic, hwave_profile** out);
HWAVE_API hwave_status hwave_profile_eval(const hwave_profile* f, double lambda, double* out);
HWAVE_API void hwave_profile_free(hwave_profile* f);

/* ---- fields ---- */

typedef struct hwave_field hwave_field;

HWAVE_API size_t hwave_field_nt(const hwave_field* u);
HWAVE_API size_t hwave_field_nr(const hwave_field* u);
HWAVE_API const double* hwave_field_t_grid(const hwave_field* u);
HWAVE_API const double* hwave_field_r_grid(const hwave_field* u);
/* Row-major values, nt * nr. */
HWAVE_API const double* hwave_field_values(const hwave_field* u);
HWAVE_API void hwave_field_free(hwave_field* u);

/* ---- configuration records ---- */

typedef struct hwave_quadrature {
  int nodes_inner;
  int nodes_outer;
  double abs_tol;
  double rel_tol;
  int strict;
} hwave_quadrature;

typedef enum hwave_nonlinearity_kind {
  HWAVE_F_NONE = 0,
  HWAVE_F_CANONICAL = 1,
  HWAVE_F_GENERIC = 2
} hwave_nonlinearity_kind;

typedef struct hwave_nonlinearity {
  hwave_nonlinearity_kind kind;
  double p;
  double q;
  double delta0;
  double A;
} hwave_nonlinearity;

typedef struct hwave_fd_config {
  double dr;
  double dt;
  double r_max;
  double t_max;
  int stride_t;
  int stride_r;
} hwave_fd_config;

typedef struct hwave_solver_config {
  double h;
  double epsilon;
  double t_max;
  double r_max;
  double dt;
  double dr;
  int max_iters;
  double fixed_point_tol;
  double k;
  int enforce_envelope;
  double N_h; /* <= 0: estimated */
  hwave_quadrature quadrature;
} hwave_solver_config;

HWAVE_API void hwave_quadrature_default(hwave_quadrature* q);
HWAVE_API void hwave_nonlinearity_default(hwave_nonlinearity* f);
HWAVE_API void hwave_fd_config_default(hwave_fd_config* cfg);
HWAVE_API void hwave_solver_config_default(hwave_solver_config* cfg);

/* ---- kernels ---- */

/* q may be NULL for defaults. */
HWAVE_API hwave_status hwave_spherical_mean(const hwave_profile* f, double t, double r,
                                            const hwave_quadrature* q, double* out);
HWAVE_API hwave_status hwave_sine_propagator(const hwave_profile* phi, double t, double r,
                                             const hwave_quadrature* q, double* out);
HWAVE_API hwave_status hwave_linear_solution(const hwave_profile* u0, const hwave_profile* u1,
                                             double t, double r, const hwave_quadrature* q,
                                             double* out);
HWAVE_API hwave_status hwave_F(double u, const hwave_nonlinearity* f, double* out);

/* ---- solvers ---- */

HWAVE_API hwave_status hwave_fd_solve(const hwave_profile* u0, const hwave_profile* u1,
                                      const hwave_nonlinearity* f, const hwave_fd_config* cfg,
                                      double epsilon, hwave_field** out);

/* iterations and residual may be NULL. */
HWAVE_API hwave_status hwave_picard_solve(const hwave_profile* u0, const hwave_profile* u1,
                                          const hwave_nonlinearity* f,
                                          const hwave_solver_config* cfg, hwave_field** out,
                                          int* iterations, double* residual);

HWAVE_API hwave_status hwave_weighted_norm(const hwave_field* u, double h, double* out);

/* ---- blow-up ---- */

/* l0 and A0 of the polynomial boost for 1 < p < 3. */
HWAVE_API hwave_status hwave_boost_l0(double p, int* l0, double* A0);
HWAVE_API hwave_status hwave_blowup_time_bound(double A0, double E, double q, double tau0,
                                               double c, double epsilon, double delta0,
                                               double tilde_c, double* T);

/* ---- command runner ---- */

typedef struct hwave_run_request {
  const char* command;     /* propagate | solve | decay | contraction | blowup | certify */
  const char* config_path;
  const char* out_dir;     /* NULL: current directory */
  int has_seed;
  uint64_t seed;
} hwave_run_request;

/* Runs one command end to end and returns its exit code (0, 2, 3 or 4).
   Diagnostics go to stderr, a one-line summary to stdout. */
HWAVE_API int hwave_run(const hwave_run_request* request);

#ifdef __cplusplus
}
#endif

#endif
