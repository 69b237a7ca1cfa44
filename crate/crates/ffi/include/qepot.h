#ifndef QEPOT_H
#define QEPOT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>

typedef enum QepotFhConvention {
  /**
   * a^2 = beta hbar^2 / 12m
   */
  QEPOT_FH_CONVENTION_TWELFTH = 0,
  /**
   * a^2 = beta hbar^2 / 3m
   */
  QEPOT_FH_CONVENTION_THIRD = 1,
} QepotFhConvention;

typedef enum QepotMethod {
  QEPOT_METHOD_CLASSICAL = 0,
  QEPOT_METHOD_FEYNMAN_HIBBS = 1,
  QEPOT_METHOD_FEYNMAN_KLEINERT = 2,
  QEPOT_METHOD_LH_BARE = 3,
  QEPOT_METHOD_LH_RENORMALIZED = 4,
  QEPOT_METHOD_LH_MAPPED = 5,
} QepotMethod;

typedef enum QepotPolicy {
  QEPOT_POLICY_CLAMP = 0,
  QEPOT_POLICY_CONTINUATION = 1,
} QepotPolicy;

typedef enum QepotStatus {
  QEPOT_STATUS_OK = 0,
  QEPOT_STATUS_NULL_POINTER = 1,
  QEPOT_STATUS_INVALID_ARGUMENT = 2,
  QEPOT_STATUS_NUMERICAL = 3,
  QEPOT_STATUS_CONFIG = 4,
  QEPOT_STATUS_IO = 5,
  QEPOT_STATUS_BUFFER_TOO_SMALL = 6,
  QEPOT_STATUS_THRESHOLD_FAILED = 7,
  QEPOT_STATUS_PANIC = 8,
} QepotStatus;

/**
 * Opaque potential.
 */
typedef struct QepotPotential QepotPotential;

/**
 * Opaque table: grid, density, effective potential and ln Z.
 */
typedef struct QepotTable QepotTable;

/**
 * Method options. `cap` is read only under `Continuation`.
 */
typedef struct QepotOptions {
  enum QepotFhConvention fh_convention;
  enum QepotPolicy policy;
  double cap;
} QepotOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * Valid until the next call on the same thread.
 */
const char *qepot_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qepot_version(void);

struct QepotOptions qepot_options_default(void);

/**
 * `m w^2 x^2 / 2 + g x^4 / 4`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum QepotStatus qepot_potential_harmonic_quartic(double mass,
                                                  double omega,
                                                  double g,
                                                  struct QepotPotential **out);

/**
 * Symmetric double well `-m w^2 x^2 / 2 + g x^4 / 4 + m w^4 / (16 g)`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum QepotStatus qepot_potential_double_well(double mass,
                                             double omega,
                                             double g,
                                             struct QepotPotential **out);

/**
 * `D (1 - exp(-alpha (x - x_e)))^2` in Hartree and bohr.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum QepotStatus qepot_potential_morse(double d,
                                       double alpha,
                                       double x_e,
                                       struct QepotPotential **out);

/**
 * OH stretch Morse potential; writes the reduced mass (electron masses) to
 * `mass` when it is not null.
 *
 * # Safety
 * `out` must be valid for a write; `mass` null or valid for a write.
 */
enum QepotStatus qepot_potential_morse_oh(struct QepotPotential **out, double *mass);

/**
 * `sum_k c[k] x^k` for `k < len`.
 *
 * # Safety
 * `coefficients` must point to `len` readable doubles; `out` valid for a write.
 */
enum QepotStatus qepot_potential_monomial_sum(const double *coefficients,
                                              size_t len,
                                              struct QepotPotential **out);

/**
 * # Safety
 * `potential` must come from a constructor above and not be used afterwards.
 */
void qepot_potential_free(struct QepotPotential *potential);

/**
 * # Safety
 * `potential` must be a live handle; `value` valid for a write.
 */
enum QepotStatus qepot_potential_value(const struct QepotPotential *potential,
                                       double x,
                                       double *value);

/**
 * Tabulate one effective-potential method on `n_points` nodes of
 * `[x_min, x_max]`. `options` may be null for the defaults.
 *
 * # Safety
 * `potential` must be a live handle, `options` null or readable, `out` valid
 * for a write.
 */
enum QepotStatus qepot_evaluate(const struct QepotPotential *potential,
                                enum QepotMethod method,
                                double beta,
                                double mass,
                                double x_min,
                                double x_max,
                                size_t n_points,
                                const struct QepotOptions *options,
                                struct QepotTable **out);

/**
 * Converged finite-difference thermal density. The grid may be widened when
 * density reaches its edges; read the result length with `qepot_table_len`.
 *
 * # Safety
 * `potential` must be a live handle and `out` valid for a write.
 */
enum QepotStatus qepot_exact(const struct QepotPotential *potential,
                             double beta,
                             double mass,
                             double x_min,
                             double x_max,
                             size_t n_points,
                             struct QepotTable **out);

/**
 * # Safety
 * `table` must come from `qepot_evaluate`/`qepot_exact` and not be used afterwards.
 */
void qepot_table_free(struct QepotTable *table);

/**
 * Number of grid nodes, 0 for a null table.
 *
 * # Safety
 * `table` must be null or a live handle.
 */
size_t qepot_table_len(const struct QepotTable *table);

/**
 * # Safety
 * `table` must be a live handle; `ln_z` valid for a write.
 */
enum QepotStatus qepot_table_ln_z(const struct QepotTable *table, double *ln_z);

/**
 * Copy the grid nodes into `buf` (at least `qepot_table_len` doubles).
 *
 * # Safety
 * `table` must be a live handle; `buf` writable for `len` doubles.
 */
enum QepotStatus qepot_table_x(const struct QepotTable *table, double *buf, size_t len);

/**
 * Copy the normalized density into `buf`.
 *
 * # Safety
 * `table` must be a live handle; `buf` writable for `len` doubles.
 */
enum QepotStatus qepot_table_density(const struct QepotTable *table, double *buf, size_t len);

/**
 * Copy the effective potential into `buf`.
 *
 * # Safety
 * `table` must be a live handle; `buf` writable for `len` doubles.
 */
enum QepotStatus qepot_table_v_eff(const struct QepotTable *table, double *buf, size_t len);

/**
 * Run a scenario given as config text and write its files to `out_dir`,
 * Metropolis-sampling too when `sample` is set. Returns `ThresholdFailed` when the run completed but a declared threshold
 * or a method failed.
 *
 * # Safety
 * `config` and `out_dir` must be NUL-terminated strings.
 */
enum QepotStatus qepot_run_config(const char *config,
                                  const char *out_dir,
                                  bool sample);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QEPOT_H */
