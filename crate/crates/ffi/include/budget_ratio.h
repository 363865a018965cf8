#ifndef BUDGET_RATIO_H
#define BUDGET_RATIO_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BrStatus {
  BR_STATUS_OK = 0,
  BR_STATUS_NULL_POINTER = 1,
  BR_STATUS_INVALID_INPUT = 2,
  BR_STATUS_TOO_LARGE = 3,
  BR_STATUS_INFEASIBLE = 4,
  BR_STATUS_NO_CONVERGENCE = 5,
  BR_STATUS_PARSE = 6,
  BR_STATUS_UNKNOWN_DISTRIBUTION = 7,
  BR_STATUS_IO = 8,
  BR_STATUS_BUFFER_TOO_SMALL = 9,
  BR_STATUS_PANIC = 10,
  BR_STATUS_OTHER = 11,
} BrStatus;

/**
 * Opaque block instance.
 */
typedef struct BrBlocks BrBlocks;

/**
 * Opaque budget grid.
 */
typedef struct BrGrid BrGrid;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *br_last_error_message(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *br_version(void);

/**
 * Grid with increasing budgets `rho[0..m]` and probabilities `p[0..m]`.
 *
 * # Safety
 * `rho` and `p` must point to `m` doubles; `out_grid` must be writable.
 */
enum BrStatus br_grid_new(const double *rho, const double *p, size_t m, struct BrGrid **out_grid);

/**
 * Grid for a builtin distribution name or a distribution file path.
 * `points == 0` keeps the default resolution.
 *
 * # Safety
 * `name` must be a nul-terminated string; `out_grid` must be writable.
 */
enum BrStatus br_grid_from_distribution(const char *name,
                                        size_t points,
                                        double tau,
                                        struct BrGrid **out_grid);

/**
 * Number of budgets in the grid, 0 for null.
 *
 * # Safety
 * `g` must be null or a live grid.
 */
size_t br_grid_len(const struct BrGrid *g);

/**
 * Copies budgets and probabilities into caller buffers of length `cap`.
 *
 * # Safety
 * `g` must be a live grid; `rho` and `p` must hold `cap` doubles.
 */
enum BrStatus br_grid_values(const struct BrGrid *g, double *rho, double *p, size_t cap);

/**
 * # Safety
 * `g` must be null or a grid not yet freed.
 */
void br_grid_free(struct BrGrid *g);

/**
 * Expected greedy ratio of the instance with block weights `beta`.
 *
 * # Safety
 * `beta` must hold `len` doubles; `out_ratio` must be writable.
 */
enum BrStatus br_expected_ratio(const struct BrGrid *g,
                                const double *beta,
                                size_t len,
                                double *out_ratio);

/**
 * Per-budget greedy ratios written into `out_ratios[0..len]`.
 *
 * # Safety
 * `beta` and `out_ratios` must each hold `len` doubles.
 */
enum BrStatus br_per_budget_ratios(const struct BrGrid *g,
                                   const double *beta,
                                   size_t len,
                                   double *out_ratios);

/**
 * Worst-case expected ratio over all instances for the grid. The
 * minimizing weights go to `out_beta` when it is non-null and holds
 * `beta_cap >= len` doubles.
 *
 * # Safety
 * Pointers must be valid as described.
 */
enum BrStatus br_minimize(const struct BrGrid *g,
                          size_t starts,
                          size_t max_evals,
                          uint64_t seed,
                          double *out_ratio,
                          double *out_beta,
                          size_t beta_cap);

/**
 * Block instance from weights `alpha` and widths `delta`.
 *
 * # Safety
 * `alpha` and `delta` must hold `n` doubles; `out_blocks` must be writable.
 */
enum BrStatus br_blocks_new(const double *alpha,
                            const double *delta,
                            size_t n,
                            struct BrBlocks **out_blocks);

/**
 * # Safety
 * `b` must be null or a block instance not yet freed.
 */
void br_blocks_free(struct BrBlocks *b);

/**
 * Optimum value at budget `budget`.
 *
 * # Safety
 * `b` must be a live instance; `out_value` must be writable.
 */
enum BrStatus br_blocks_opt_value(const struct BrBlocks *b, double budget, double *out_value);

/**
 * Best value obtainable by splitting `budget` across blocks.
 *
 * # Safety
 * `b` must be a live instance; `out_value` must be writable.
 */
enum BrStatus br_blocks_best_value(const struct BrBlocks *b, double budget, double *out_value);

/**
 * Greedy ratio at `budget` for a density-sorted instance.
 *
 * # Safety
 * `b` must be a live instance; `out_ratio` must be writable.
 */
enum BrStatus br_blocks_greedy_ratio(const struct BrBlocks *b, double budget, double *out_ratio);

/**
 * Maximum two-block ratio of the hard family with parameter `q`, its
 * argmax and the bound on the remaining mass.
 *
 * # Safety
 * Out-pointers must be writable; `out_tail` may be null.
 */
enum BrStatus br_lower_bound_max(uint32_t q, double *out_argmax, double *out_max, double *out_tail);

/**
 * Expected greedy ratio for two equally likely budgets `rho < 1` with the
 * first block holding fraction `c` of the value.
 *
 * # Safety
 * `out_ratio` must be writable.
 */
enum BrStatus br_two_budget_ratio(double rho, double c, double *out_ratio);

/**
 * Hardness ratio for two budgets parameterized by `rho` and `alpha`.
 *
 * # Safety
 * `out_ratio` must be writable.
 */
enum BrStatus br_two_budget_hardness(double rho, double alpha, double *out_ratio);

/**
 * Worst `c` for two budgets and the ratio there.
 *
 * # Safety
 * Out-pointers must be writable.
 */
enum BrStatus br_two_budget_worst(double rho, double *out_c, double *out_ratio);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BUDGET_RATIO_H */
