#ifndef NNSPARSE_H
#define NNSPARSE_H

/* Generated by cbindgen; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result codes.
 */
typedef enum NnsStatus {
  NNS_STATUS_OK = 0,
  NNS_STATUS_NULL_POINTER = 1,
  NNS_STATUS_INVALID_ARGUMENT = 2,
  NNS_STATUS_PARSE = 3,
  NNS_STATUS_INFEASIBLE = 4,
  NNS_STATUS_INSUFFICIENT_SAMPLES = 5,
  NNS_STATUS_IO = 6,
  NNS_STATUS_OUT_OF_RANGE = 7,
  NNS_STATUS_INTERNAL = 99,
} NnsStatus;

/**
 * Why a solve finished.
 */
typedef enum NnsStopReason {
  NNS_STOP_REASON_PSI_TARGET = 0,
  NNS_STOP_REASON_BUDGET = 1,
  NNS_STOP_REASON_RESIDUAL_TARGET = 2,
} NnsStopReason;

/**
 * Stop rule selector for [`nns_solve`].
 */
typedef enum NnsStopRule {
  NNS_STOP_RULE_THEORY = 0,
  NNS_STOP_RULE_RESIDUAL = 1,
} NnsStopRule;

/**
 * A Gaussian mixture with axis-aligned components.
 */
typedef struct NnsMixture NnsMixture;

/**
 * The outcome of a solve.
 */
typedef struct NnsReport NnsReport;

/**
 * A normalized nonnegative system.
 */
typedef struct NnsSystem NnsSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *nns_last_error_message(void);

/**
 * Builds and normalizes an `m × n` system from `nnz` triplets
 * `(rows[i], cols[i], vals[i])` (0-based, duplicates summed) and `b[0..m]`.
 *
 * # Safety
 * The arrays must hold `nnz` (respectively `m`) readable elements and `out`
 * must be writable.
 */
enum NnsStatus nns_system_from_triplets(size_t m,
                                        size_t n,
                                        const size_t *rows,
                                        const size_t *cols,
                                        const double *vals,
                                        size_t nnz,
                                        const double *b,
                                        struct NnsSystem **out);

/**
 * Reads an instance file and normalizes it.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` writable.
 */
enum NnsStatus nns_system_from_file(const char *path, struct NnsSystem **out);

/**
 * # Safety
 * `sys` must be null or a handle not yet freed.
 */
void nns_system_free(struct NnsSystem *sys);

/**
 * Row count, number of kept columns and number of original columns.
 *
 * # Safety
 * `sys` must be a live handle; each out pointer may be null.
 */
enum NnsStatus nns_system_shape(const struct NnsSystem *sys,
                                size_t *m,
                                size_t *n_kept,
                                size_t *n_original);

/**
 * Runs the solver for sparsity `k` and error `epsilon`. `budget = 0` keeps
 * the default iteration cap; `stop` is an [`NnsStopRule`] value.
 *
 * # Safety
 * `sys` must be a live handle and `out` writable.
 */
enum NnsStatus nns_solve(const struct NnsSystem *sys,
                         size_t k,
                         double epsilon,
                         uint64_t budget,
                         uint32_t stop,
                         struct NnsReport **out);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void nns_report_free(struct NnsReport *report);

/**
 * Residual, support size, iteration count and stop reason of a report.
 *
 * # Safety
 * `report` must be a live handle; each out pointer may be null.
 */
enum NnsStatus nns_report_summary(const struct NnsReport *report,
                                  double *residual,
                                  size_t *support,
                                  size_t *iterations,
                                  enum NnsStopReason *reason);

/**
 * Copies the normalized solution (original column ids, weights summing to
 * one) into caller buffers of length `capacity`. Fails with `OutOfRange`
 * if `capacity` is below the support size, which is written to `written`
 * either way.
 *
 * # Safety
 * `ids` and `weights` must be writable for `capacity` elements.
 */
enum NnsStatus nns_report_solution(const struct NnsReport *report,
                                   size_t *ids,
                                   double *weights,
                                   size_t capacity,
                                   size_t *written);

/**
 * Learns a mixture from `n_rows × d` row-major samples. `eps1 ≤ 0` and
 * `n_candidates = 0` select the defaults.
 *
 * # Safety
 * `samples` must hold `n_rows · d` readable values and `out` be writable.
 */
enum NnsStatus nns_learn(const double *samples,
                         size_t n_rows,
                         size_t d,
                         size_t k,
                         double epsilon,
                         double eps1,
                         size_t n_candidates,
                         uint64_t seed,
                         struct NnsMixture **out);

/**
 * # Safety
 * `mix` must be null or a handle not yet freed.
 */
void nns_mixture_free(struct NnsMixture *mix);

/**
 * Dimension, component count and the binned residual of the fit.
 *
 * # Safety
 * `mix` must be a live handle; each out pointer may be null.
 */
enum NnsStatus nns_mixture_shape(const struct NnsMixture *mix,
                                 size_t *d,
                                 size_t *components,
                                 double *binned_residual);

/**
 * Weight, mean and per-axis variance of component `index`; `mean` and
 * `var` must each have room for `d` values.
 *
 * # Safety
 * `mix` must be a live handle and the buffers writable for `d` values.
 */
enum NnsStatus nns_mixture_component(const struct NnsMixture *mix,
                                     size_t index,
                                     double *weight,
                                     double *mean,
                                     double *var);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NNSPARSE_H */
