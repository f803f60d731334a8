/*
 * C interface to the overmeasure threshold-calibration library.
 *
 * Every function returns an om_status; results come back through out
 * parameters, which are left untouched on failure. After a failure,
 * om_last_error() returns a message for the calling thread.
 *
 * Handles (om_rule, om_job) are opaque and owned by the caller once
 * created; release them with the matching *_destroy function.
 */
#ifndef OVERMEASURE_H
#define OVERMEASURE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(OVERMEASURE_BUILDING)
#    define OM_API __declspec(dllexport)
#  else
#    define OM_API __declspec(dllimport)
#  endif
#else
#  define OM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum om_status {
  OM_OK = 0,
  OM_ERR_DOMAIN = 1,
  OM_ERR_CONVERGENCE = 2,
  OM_ERR_INFEASIBLE = 3,
  OM_ERR_INFEASIBLE_CONDITIONING = 4,
  OM_ERR_SOLVER = 5,
  OM_ERR_CONFIGURATION = 6,
  OM_ERR_INSUFFICIENT_DATA = 7,
  OM_ERR_PARSE = 8,
  OM_ERR_IO = 9,
  OM_ERR_NULL_ARGUMENT = 10,
  OM_ERR_INTERNAL = 11
} om_status;

OM_API const char* om_version(void);
OM_API const char* om_status_name(om_status status);
/* Message for the last failure on this thread; "" if none. */
OM_API const char* om_last_error(void);

/* ---- Gaussian primitives ---------------------------------------------- */

OM_API om_status om_std_normal_cdf(double x, double* out);
OM_API om_status om_std_normal_quantile(double p, double* out);
OM_API om_status om_log_cdf_power(double x, uint64_t n, double* out);

/* ---- Calibration -------------------------------------------------------- */

typedef struct om_safety_spec {
  double q0;
  double p0;
} om_safety_spec;

typedef enum om_prior_kind { OM_PRIOR_LOG_UNIFORM = 0, OM_PRIOR_POINT = 1 } om_prior_kind;

typedef struct om_sigma_prior {
  om_prior_kind kind;
  double sigma_lo;
  double sigma_hi; /* must equal sigma_lo for OM_PRIOR_POINT */
} om_sigma_prior;

typedef struct om_calibration_result {
  double threshold;
  double achieved;
  uint32_t iterations;
  double bracket_lo;
  double bracket_hi;
  int capped;
  double uncapped_threshold; /* +inf when the exceedance never reaches p0 */
} om_calibration_result;

/* A standard: schedule of (n', t) pairs, first entry is the required n. */
typedef struct om_rule om_rule;

OM_API om_status om_next_exceeds_max_probability(uint64_t n, double* out);
OM_API om_status om_marginal_exceedance(const om_safety_spec* spec, double sigma, double* out);
OM_API om_status om_conditional_exceedance(const om_safety_spec* spec, double threshold,
                                           uint64_t n, const om_sigma_prior* prior,
                                           double* out);
OM_API om_status om_calibrate_threshold(const om_safety_spec* spec, uint64_t n,
                                        const om_sigma_prior* prior, int cap_at_q0,
                                        double tol, om_calibration_result* out);
OM_API om_status om_threshold_schedule(const om_safety_spec* spec,
                                       const om_sigma_prior* prior, const uint64_t* n_list,
                                       size_t count, int cap_at_q0, double tol,
                                       om_rule** out);
OM_API om_status om_acceptance_probability(double sigma_true, double threshold, uint64_t n,
                                           double* out);

OM_API om_status om_rule_create(const uint64_t* n_primes, const double* thresholds,
                                size_t count, om_rule** out);
OM_API void om_rule_destroy(om_rule* rule);
OM_API size_t om_rule_size(const om_rule* rule);
OM_API om_status om_rule_entry(const om_rule* rule, size_t index, uint64_t* n_prime,
                               double* threshold);

typedef struct om_compliance {
  int safe;
  size_t entry_index;
  uint64_t applied_n_prime;
  double applied_threshold;
  double observed_max;
} om_compliance;

OM_API om_status om_evaluate_compliance(const om_rule* rule, const double* measurements,
                                        size_t count, om_compliance* out);

/* ---- Monte Carlo -------------------------------------------------------- */

typedef struct om_stream {
  uint64_t seed;
  uint64_t stream_index;
  unsigned workers; /* 0: one per hardware thread; never changes results */
} om_stream;

typedef struct om_simulation_report {
  double estimate;
  double standard_error;
  uint64_t trials;
  uint64_t accepted_runs;
} om_simulation_report;

typedef enum om_design_mode { OM_DESIGN_FIXED_SIGMA = 0, OM_DESIGN_MINIMAL_EFFORT = 1 } om_design_mode;
typedef enum om_rule_kind { OM_RULE_FIXED_THRESHOLD = 0, OM_RULE_SCHEDULE = 1 } om_rule_kind;

typedef struct om_paradox_row {
  uint64_t n_prime;
  om_simulation_report rejection_fixed;
  om_simulation_report rejection_schedule;
} om_paradox_row;

OM_API om_status om_sample_standard_normal(const om_stream* stream, double* out, size_t count);
OM_API om_status om_simulate_minimal_effort(uint64_t n, uint64_t trials,
                                            const om_stream* stream,
                                            om_simulation_report* out);
OM_API om_status om_simulate_compliance(const om_rule* rule, om_design_mode mode,
                                        double sigma_true, uint64_t n_performed,
                                        om_rule_kind rule_kind, uint64_t trials,
                                        const om_stream* stream, om_simulation_report* out);
/* rows must hold `count` entries. */
OM_API om_status om_paradox_curve(double sigma_true, const om_rule* rule,
                                  const uint64_t* n_list, size_t count, uint64_t trials,
                                  const om_stream* stream, om_paradox_row* rows);
OM_API om_status om_simulate_conditional_exceedance(const om_safety_spec* spec,
                                                    const om_sigma_prior* prior,
                                                    double threshold, uint64_t n,
                                                    uint64_t trials, const om_stream* stream,
                                                    om_simulation_report* out);

typedef enum om_expected_max_method {
  OM_EXPECTED_MAX_GAMMA_PREFACTOR = 0,
  OM_EXPECTED_MAX_EXACT = 1,
  OM_EXPECTED_MAX_MONTE_CARLO = 2
} om_expected_max_method;

/* stream and trials are only read by OM_EXPECTED_MAX_MONTE_CARLO;
 * standard_error may be NULL. */
OM_API om_status om_expected_max(uint64_t n, double sigma, om_expected_max_method method,
                                 uint64_t trials, const om_stream* stream, double* value,
                                 double* standard_error);
OM_API om_status om_euler_gamma_partial(uint64_t n, double* out);

/* ---- Job files ------------------------------------------------------------ */

typedef struct om_job om_job;

OM_API om_status om_job_parse(const char* text, om_job** out);
OM_API om_status om_job_load(const char* path, om_job** out);
OM_API void om_job_destroy(om_job* job);
/* Allocates *out; release with om_string_free. */
OM_API om_status om_job_serialize(const om_job* job, char** out);
OM_API void om_string_free(char* s);

OM_API om_status om_job_spec(const om_job* job, om_safety_spec* out);
OM_API om_status om_job_prior(const om_job* job, om_sigma_prior* out);
OM_API uint64_t om_job_n_required(const om_job* job);
/* Pointer stays valid until the job is destroyed. */
OM_API const uint64_t* om_job_n_list(const om_job* job, size_t* count);
OM_API int om_job_cap_at_q0(const om_job* job);
OM_API double om_job_tol(const om_job* job);
OM_API uint64_t om_job_trials(const om_job* job);
OM_API uint64_t om_job_seed(const om_job* job);
OM_API om_status om_job_set_trials(om_job* job, uint64_t trials);
OM_API void om_job_set_seed(om_job* job, uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif /* OVERMEASURE_H */
