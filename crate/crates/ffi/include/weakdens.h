/* C interface of the weakdens library. Generated by cbindgen; do not edit. */

#ifndef WEAKDENS_H
#define WEAKDENS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum WdStatus {
  WD_STATUS_OK = 0,
  WD_STATUS_NULL_POINTER = 1,
  WD_STATUS_INVALID_UTF8 = 2,
  WD_STATUS_DOMAIN = 3,
  WD_STATUS_STATIONARITY = 4,
  WD_STATUS_INNOVATIONS_EXHAUSTED = 5,
  WD_STATUS_INDEX_OUT_OF_RANGE = 6,
  WD_STATUS_ENUMERATION_INFEASIBLE = 7,
  WD_STATUS_HYPOTHESIS = 8,
  WD_STATUS_SLOPE_FIT = 9,
  WD_STATUS_CONFIG_PARSE = 10,
  WD_STATUS_MISSING_DENSITY = 11,
  WD_STATUS_IO = 12,
  WD_STATUS_PANIC = 13,
} WdStatus;

/**
 * Opaque simulated-path handle.
 */
typedef struct WdPath WdPath;

/**
 * Opaque process handle.
 */
typedef struct WdProcess WdProcess;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; never freed.
 */
const char *wd_version(void);

/**
 * Thread-local message for the most recent failure on this thread. Valid
 * until the next failing call on the same thread; never freed.
 */
const char *wd_last_error_message(void);

/**
 * Release a string returned by this library.
 */
void wd_string_free(char *s);

/**
 * Build a process from a preset name (doubling, linear-gaussian,
 * iid-uniform, iid-gaussian, iid-cosine, bilinear-arch).
 */
enum WdStatus wd_process_preset(const char *name, struct WdProcess **out);

/**
 * Build a process from config text (the `[process]` section of the CLI
 * config format).
 */
enum WdStatus wd_process_from_config(const char *text, struct WdProcess **out);

/**
 * Canonical descriptor of the process; free with [`wd_string_free`].
 */
char *wd_process_id(const struct WdProcess *process);

void wd_process_free(struct WdProcess *process);

/**
 * Simulate a length-`n` path; reproducible in `(process, seed)`.
 */
enum WdStatus wd_simulate(const struct WdProcess *process,
                          size_t n,
                          uint64_t seed,
                          struct WdPath **out);

/**
 * Number of values in the path (0 for a null handle).
 */
size_t wd_path_len(const struct WdPath *path);

/**
 * Borrowed pointer to the path values; valid while the handle lives.
 */
const double *wd_path_values(const struct WdPath *path);

void wd_path_free(struct WdPath *path);

/**
 * Evaluate the density estimate at `len` grid points into `out_values`.
 * `estimator` is one of compact2, compact4, fejer, haar.
 */
enum WdStatus wd_estimate_grid(const struct WdPath *path,
                               const char *estimator,
                               uint32_t m,
                               const double *xs,
                               size_t len,
                               double *out_values);

/**
 * Base compact kernel K(u) for order 2 or 4.
 */
enum WdStatus wd_compact_kernel_eval(uint32_t order, double u, double *out_value);

/**
 * Fejer kernel F_m(u); NaN for m = 0.
 */
double wd_fejer_eval(uint32_t m, double u);

/**
 * Rate exponent and log power for a theorem / parameter set. `theorem` is
 * t1, t2, t3mean or t3as; `coefficient` is eta or phitilde; `decay` is
 * geometric(a,b) or riemannian(a).
 */
enum WdStatus wd_rate_exponent(const char *theorem,
                               const char *coefficient,
                               const char *decay,
                               double decay_constant,
                               double rho,
                               uint32_t d,
                               double q,
                               double *out_exponent,
                               double *out_log_power);

/**
 * Optimal integer bandwidth index at sample size n.
 */
enum WdStatus wd_optimal_bandwidth(const char *theorem,
                                   const char *coefficient,
                                   const char *decay,
                                   double decay_constant,
                                   double rho,
                                   uint32_t d,
                                   double q,
                                   size_t n,
                                   uint32_t *out_m);

/**
 * Monte Carlo moment-inequality check. Writes 1 into `out_holds` when the
 * inequality holds at the given slack, 0 otherwise.
 */
enum WdStatus wd_verify_moment(const struct WdProcess *process,
                               double x,
                               const char *estimator,
                               uint32_t m,
                               uint32_t q,
                               size_t n,
                               size_t replicates,
                               uint64_t seed,
                               double slack,
                               int32_t *out_holds,
                               double *out_lhs,
                               double *out_rhs);

/**
 * Run a full slope experiment from config text. On success `out_csv`
 * receives the result rows (fixed CSV schema) and `out_summary` the plain
 * text summary; free both with [`wd_string_free`].
 */
enum WdStatus wd_run_experiment(const char *config_text, char **out_csv, char **out_summary);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEAKDENS_H */
