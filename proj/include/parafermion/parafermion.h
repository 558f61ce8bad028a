#ifndef PARAFERMION_H
#define PARAFERMION_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PF_API __declspec(dllexport)
#else
#define PF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pf_status {
  PF_OK = 0,
  PF_INVALID_ARGUMENT = 1,
  PF_OUT_OF_DOMAIN = 2,
  PF_NUMERICAL = 3,
  PF_UNDER_RESOLVED = 4,
  PF_IO = 5,
  PF_VERIFICATION_FAILED = 6,
  PF_INTERNAL = 99
} pf_status;

/* Index arguments out of range give PF_INVALID_ARGUMENT. */

/* Message for the last failing call on this thread; "" after success. */
PF_API const char* pf_last_error(void);
PF_API const char* pf_status_name(pf_status status);
PF_API const char* pf_version(void);

/* Output paths: NULL, "" or "-" write to stdout. */

/* ---- exponents and conformal utilities ---- */

typedef struct pf_exponents {
  double kappa, a, sigma, nu, b, b_tilde;
} pf_exponents;

PF_API pf_status pf_exponents_from(double kappa, double sigma, pf_exponents* out);
PF_API pf_status pf_total_mass(double kappa, double z_re, double z_im, double* out);
PF_API pf_status pf_predict_f(double kappa, double sigma, double z_re, double z_im, double f0_re,
                              double f0_im, double* out_re, double* out_im);
PF_API pf_status pf_holomorphy_residual(double kappa, double sigma, const double* z_re,
                                        const double* z_im, size_t n, double* out);

/* ---- forward Loewner flow ---- */

typedef struct pf_curve pf_curve;

/* Samples a Brownian driving path and traces g_t^{-1}((1 - delta) e^{2iB_t})
   at every `stride`-th step. */
PF_API pf_status pf_curve_trace(uint64_t seed, double kappa, double duration, double step,
                                double delta, size_t stride, pf_curve** out);
PF_API size_t pf_curve_size(const pf_curve* curve);
PF_API size_t pf_curve_dropped(const pf_curve* curve);
PF_API pf_status pf_curve_point(const pf_curve* curve, size_t i, double* t, double* re,
                                double* im);
/* Continuous winding of the traced points about z, at the last sample. */
PF_API pf_status pf_curve_winding(const pf_curve* curve, double z_re, double z_im,
                                  double normal_arg, double* out);
PF_API pf_status pf_curve_write_csv(const pf_curve* curve, const char* path);
PF_API void pf_curve_free(pf_curve* curve);

/* ---- reverse flow ---- */

typedef struct pf_reverse_state {
  double t, theta, r, b, T;
} pf_reverse_state;

typedef struct pf_reverse_path pf_reverse_path;

PF_API pf_status pf_reverse_simulate(double kappa, double delta, double duration, double dt,
                                     uint64_t seed, pf_reverse_path** out);
PF_API size_t pf_reverse_size(const pf_reverse_path* path);
PF_API pf_status pf_reverse_state_at(const pf_reverse_path* path, size_t i,
                                     pf_reverse_state* out);
PF_API pf_status pf_reverse_sandwich(const pf_reverse_path* path, double slack, int* passed,
                                     double* max_violation);
PF_API pf_status pf_reverse_write_csv(const pf_reverse_path* path, const char* out_path);
PF_API void pf_reverse_free(pf_reverse_path* path);

/* ---- Monte Carlo observable ---- */

typedef struct pf_mc_config {
  size_t paths;
  double dt;
  double delta;
  double tail_tol;
  uint64_t seed;
  unsigned workers; /* 0: all cores */
  double stiffness;
} pf_mc_config;

typedef struct pf_estimate {
  double mean_re, mean_im, std_error;
  size_t n, dropped;
  pf_exponents params;
} pf_estimate;

PF_API void pf_mc_config_default(pf_mc_config* config);
PF_API pf_status pf_estimate_f0(double kappa, double sigma, const pf_mc_config* config,
                                pf_estimate* out);
PF_API pf_status pf_estimate_write_json(const pf_estimate* estimate, const pf_mc_config* config,
                                        const char* path);

/* ---- analytic bounds ---- */

typedef struct pf_beta_profile {
  double a, beta_min, x_argmax, taylor_floor, x_max;
} pf_beta_profile;

PF_API pf_status pf_minimal_beta(double a, double x_max, double refine_tol, pf_beta_profile* out);
PF_API pf_status pf_variance_ceiling(double a, double beta, double* out);
PF_API pf_status pf_theta_variance_envelope(double a, double beta, double delta, double t,
                                            double* out);
PF_API pf_status pf_nontriviality_lower_bound(double a, double sigma, double beta, double* out);

typedef struct pf_range {
  double start, stop;
  size_t count;
} pf_range;

/* "start:stop:count" or a single number. */
PF_API pf_status pf_parse_range(const char* text, pf_range* out);

typedef struct pf_region pf_region;

/* fixed_beta = 0: minimal beta per a; otherwise beta = 1 on [1/4, 3/4] and
   beta = 2 on [1/2, 1]. */
PF_API pf_status pf_region_scan(pf_range a, pf_range sigma, int fixed_beta, unsigned workers,
                                pf_region** out);
PF_API size_t pf_region_rows(const pf_region* region);
PF_API size_t pf_region_cols(const pf_region* region);
PF_API pf_status pf_region_cell(const pf_region* region, size_t i, size_t j, double* a,
                                double* sigma, double* beta, double* lower_bound,
                                int* admissible);
PF_API pf_status pf_region_write_csv(const pf_region* region, const char* path);
PF_API void pf_region_free(pf_region* region);

typedef struct pf_root_pair {
  double a0, a1, kappa0, kappa1, residual0, residual1;
  char a0_digits[32], a1_digits[32], kappa0_digits[32], kappa1_digits[32];
} pf_root_pair;

PF_API pf_status pf_solve_conformal_range(double tol, pf_root_pair* out);
PF_API pf_status pf_roots_write_json(const pf_root_pair* roots, const char* path);

/* ---- discrete self-avoiding walks ---- */

typedef struct pf_domain pf_domain;
typedef struct pf_field pf_field;

/* A shape name ("cell", "flower", "block", "block:W:H") or a file of
   "q r" cell lines. */
PF_API pf_status pf_domain_load(const char* spec_or_path, pf_domain** out);
PF_API size_t pf_domain_vertex_count(const pf_domain* domain);
PF_API size_t pf_domain_mid_edge_count(const pf_domain* domain);
PF_API size_t pf_domain_boundary_count(const pf_domain* domain);
/* Mid-edge index of the k-th boundary mid-edge. */
PF_API pf_status pf_domain_boundary_mid_edge(const pf_domain* domain, size_t k, int* out);
PF_API void pf_domain_free(pf_domain* domain);

/* Walks from boundary mid-edge w, the empty walk included; max_len = 0: exhaustive. */
PF_API pf_status pf_saw_count(const pf_domain* domain, int w, size_t max_len, size_t* out);

/* max_len = 0: exhaustive. */
PF_API pf_status pf_discrete_observable(const pf_domain* domain, int w, double x, double sigma,
                                        size_t max_len, pf_field** out);
PF_API pf_status pf_field_info(const pf_field* field, int* truncated, size_t* walks);
PF_API pf_status pf_field_value(const pf_field* field, int m, double* re, double* im,
                                double* unsigned_sum);
PF_API pf_status pf_field_max_residual(const pf_field* field, double* out);
PF_API pf_status pf_field_write_csv(const pf_field* field, const char* path);
PF_API pf_status pf_residual_write_csv(const pf_field* field, const char* path);
PF_API void pf_field_free(pf_field* field);

/* Turning number of a fixture walk, by turn counting and by argument
   tracking. */
PF_API pf_status pf_fixture_turning(const char* fixture_path, double* by_turns,
                                    double* by_argument);

/* ---- acceptance criteria ---- */

typedef struct pf_verify_options {
  uint64_t seed;
  unsigned workers;
  size_t paths;
  size_t ks_paths;
  const char* fixture_path;
} pf_verify_options;

typedef struct pf_criterion_result {
  int id;
  int passed;
  double seconds;
  char name[64];
  char detail[512];
} pf_criterion_result;

PF_API void pf_verify_options_default(pf_verify_options* options);
PF_API int pf_criterion_count(void);
/* PF_OK whenever the criterion ran; check out->passed. */
PF_API pf_status pf_verify_criterion(int id, const pf_verify_options* options,
                                     pf_criterion_result* out);

#ifdef __cplusplus
}
#endif

#endif
