#ifndef OMAS_H
#define OMAS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Closed-form lower bounds.
typedef enum OmasBoundMethod {
  OMAS_BOUND_METHOD_PING = 0,
  OMAS_BOUND_METHOD_INFECTION_MATRIX = 1,
  OMAS_BOUND_METHOD_INFECTION_ALGEBRAIC = 2,
  OMAS_BOUND_METHOD_RELAXED = 3,
} OmasBoundMethod;

// Result codes returned by every fallible function.
typedef enum OmasStatus {
  OMAS_STATUS_OK = 0,
  OMAS_STATUS_INVALID_PARAMS = 1,
  OMAS_STATUS_RATIO_UNDEFINED = 2,
  OMAS_STATUS_INDETERMINATE = 3,
  OMAS_STATUS_RESOLVENT_UNDEFINED = 4,
  OMAS_STATUS_QUADRATURE_FAILED = 5,
  OMAS_STATUS_ODE_FAILED = 6,
  OMAS_STATUS_NO_DYNAMICS = 7,
  OMAS_STATUS_INVALID_SPEC = 8,
  OMAS_STATUS_IO = 9,
  OMAS_STATUS_NULL_POINTER = 10,
  OMAS_STATUS_INVALID_ARGUMENT = 11,
  OMAS_STATUS_PANIC = 12,
} OmasStatus;

typedef enum OmasValueDist {
  OMAS_VALUE_DIST_NORMAL = 0,
  OMAS_VALUE_DIST_TWO_POINT = 1,
  OMAS_VALUE_DIST_UNIFORM = 2,
} OmasValueDist;

// Opaque infection age distribution, reusable across CDF queries.
typedef struct OmasInfectionAge OmasInfectionAge;

// Opaque system parameters.
typedef struct OmasParams OmasParams;

// Mean-square error estimates from one simulation call.
typedef struct OmasMseEstimate {
  double gossip_mean;
  double gossip_std_error;
  double optimal_mean;
  double optimal_std_error;
} OmasMseEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates system parameters. `*out` receives a handle to release with
// [`omas_params_free`].
//
// # Safety
// `out` must be NULL or valid for writing one pointer.
enum OmasStatus omas_params_new(size_t n_agents,
                                double lambda_r,
                                double lambda_c,
                                double sigma_sq,
                                struct OmasParams **out);

// Releases parameters created by [`omas_params_new`]. NULL is ignored.
//
// # Safety
// `params` must be NULL or a handle not yet freed.
void omas_params_free(struct OmasParams *params);

// Selects the distribution of fresh agent values used by simulations.
// `dist` is an `OmasValueDist`.
//
// # Safety
// `params` must be NULL or a live handle.
enum OmasStatus omas_params_set_value_dist(struct OmasParams *params, int dist);

// Evaluates a lower bound on the steady-state mean-square error.
// `method` is an `OmasBoundMethod`.
//
// # Safety
// `params` must be NULL or a live handle; `out` must be NULL or writable.
enum OmasStatus omas_bound(const struct OmasParams *params, int method, double *out);

// Writes the infected-count distribution `P(s)` into `out[0..len]`, where
// `out[k]` is the probability of `k + 1` informed agents. `len` must equal
// the number of agents.
//
// # Safety
// `params` must be NULL or a live handle; `out` must be NULL or valid for
// `len` writes.
enum OmasStatus omas_infection_pk(const struct OmasParams *params,
                                  double s,
                                  double *out,
                                  size_t len);

// Builds the infection age distribution for the communication rate and
// agent count of `params`.
//
// # Safety
// `params` must be NULL or a live handle; `out` must be NULL or writable.
enum OmasStatus omas_infection_age_new(const struct OmasParams *params,
                                       struct OmasInfectionAge **out);

// `F(s)` of the infection age distribution.
//
// # Safety
// `age` must be NULL or a live handle; `out` must be NULL or writable.
enum OmasStatus omas_infection_age_cdf(const struct OmasInfectionAge *age, double s, double *out);

// Releases a handle from [`omas_infection_age_new`]. NULL is ignored.
//
// # Safety
// `age` must be NULL or a handle not yet freed.
void omas_infection_age_free(struct OmasInfectionAge *age);

// Simulates `replications` independent runs of `events` events each and
// reports the error of gossip and of the optimal estimator on the same runs.
// Results depend only on the arguments, not on the thread count.
//
// # Safety
// `params` must be NULL or a live handle; `out` must be NULL or writable.
enum OmasStatus omas_simulate_mse(const struct OmasParams *params,
                                  size_t replications,
                                  size_t events,
                                  uint64_t seed,
                                  struct OmasMseEstimate *out);

// Message for the last failure on this thread, or NULL after a success.
// The string stays valid until the next call into this library on the same
// thread.
const char *omas_last_error_message(void);

// Static description of a status code.
const char *omas_status_str(enum OmasStatus status);

// Library version, e.g. `"0.1.0"`.
const char *omas_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OMAS_H */
