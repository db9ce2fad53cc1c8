#ifndef DSNSCHED_H
#define DSNSCHED_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DsnStatus {
  DSN_STATUS_OK = 0,
  DSN_STATUS_NULL_ARGUMENT = 1,
  DSN_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed or inconsistent input document.
   */
  DSN_STATUS_INPUT = 3,
  DSN_STATUS_CONFIG = 4,
  DSN_STATUS_MODEL = 5,
  /**
   * Solver failure, including the oracle refusing a large instance.
   */
  DSN_STATUS_BACKEND = 6,
  /**
   * The schedule violates at least one rule.
   */
  DSN_STATUS_INVALID = 7,
  DSN_STATUS_PANIC = 8,
} DsnStatus;

/**
 * A parsed problem instance.
 */
typedef struct DsnInstance DsnInstance;

/**
 * The result of a schedule run.
 */
typedef struct DsnRun DsnRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *dsn_last_error(void);

/**
 * Parses an instance document.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum DsnStatus dsn_instance_load_json(const char *json, struct DsnInstance **out);

/**
 * Number of activities before splitting, or 0 for a null handle.
 *
 * # Safety
 * `instance` must be null or a live handle.
 */
size_t dsn_instance_activity_count(const struct DsnInstance *instance);

/**
 * # Safety
 * `instance` must be null or a handle not yet freed.
 */
void dsn_instance_free(struct DsnInstance *instance);

/**
 * Runs the balancer with default thresholds.
 *
 * `solver` is `oracle` or an external command template. A run whose
 * chosen schedule breaks a rule still produces a handle and returns
 * `DSN_STATUS_INVALID`.
 *
 * # Safety
 * `instance` must be a live handle, `solver` a NUL-terminated string and
 * `out` a writable pointer.
 */
enum DsnStatus dsn_schedule(const struct DsnInstance *instance,
                            const char *solver,
                            double time_limit_s,
                            uint32_t iterations,
                            struct DsnRun **out);

/**
 * Percentage of valid tracks in the chosen schedule.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
double dsn_run_valid_fraction(const struct DsnRun *run);

/**
 * # Safety
 * `run` must be null or a live handle.
 */
double dsn_run_u_avg(const struct DsnRun *run);

/**
 * # Safety
 * `run` must be null or a live handle.
 */
double dsn_run_u_max(const struct DsnRun *run);

/**
 * # Safety
 * `run` must be null or a live handle.
 */
size_t dsn_run_track_count(const struct DsnRun *run);

/**
 * Solution document as JSON, borrowed from the handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
const char *dsn_run_solution_json(const struct DsnRun *run);

/**
 * # Safety
 * `run` must be null or a handle not yet freed.
 */
void dsn_run_free(struct DsnRun *run);

/**
 * Validates a solution document against `instance` and writes the
 * percentage of valid tracks. Returns `DSN_STATUS_INVALID` when any rule
 * is broken.
 *
 * # Safety
 * `instance` must be a live handle, `solution_json` a NUL-terminated
 * string and `valid_fraction` null or writable.
 */
enum DsnStatus dsn_validate_json(const struct DsnInstance *instance,
                                 const char *solution_json,
                                 double *valid_fraction);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DSNSCHED_H */
