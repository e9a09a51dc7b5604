#ifndef FBO2D_H
#define FBO2D_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum Fbo2dStatus {
  FBO2D_STATUS_OK = 0,
  FBO2D_STATUS_NULL_POINTER = 1,
  FBO2D_STATUS_INVALID_ARGUMENT = 2,
  FBO2D_STATUS_GRID_MISMATCH = 3,
  FBO2D_STATUS_NON_HERMITIAN = 4,
  FBO2D_STATUS_NUMERICAL_FAILURE = 5,
  FBO2D_STATUS_IO = 6,
  FBO2D_STATUS_BUFFER_TOO_SMALL = 7,
  FBO2D_STATUS_PANIC = 8,
} Fbo2dStatus;

/**
 * Spectral field on a periodic grid.
 */
typedef struct Fbo2dField Fbo2dField;

/**
 * Experiment report: table, fitted constants and verdicts.
 */
typedef struct Fbo2dReport Fbo2dReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message (NUL-terminated) into
 * `buf`. Returns the message length without the NUL; nothing is written
 * when `cap` is too small.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes.
 */
size_t fbo2d_last_error(char *buf, size_t cap);

/**
 * Builds a field from `nx * ny` real samples in row-major `iy * nx + ix`
 * order on the box `[0, lx) x [0, ly)`.
 *
 * # Safety
 * `samples` must be valid for `len` doubles; `out` must be writable.
 */
enum Fbo2dStatus fbo2d_field_from_samples(size_t nx,
                                          size_t ny,
                                          double lx,
                                          double ly,
                                          const double *samples,
                                          size_t len,
                                          struct Fbo2dField **out);

/**
 * Releases a field; null is ignored.
 *
 * # Safety
 * `field` must come from this library and not be used afterwards.
 */
void fbo2d_field_free(struct Fbo2dField *field);

/**
 * Grid size of a field.
 *
 * # Safety
 * Pointers must be valid or null.
 */
enum Fbo2dStatus fbo2d_field_shape(const struct Fbo2dField *field, size_t *nx, size_t *ny);

/**
 * Writes the real samples of `field` into `out` (`len` must equal
 * `nx * ny`). Fails with `NonHermitian` if the field is not real.
 *
 * # Safety
 * `out` must be valid for `len` doubles.
 */
enum Fbo2dStatus fbo2d_field_samples(const struct Fbo2dField *field, double *out, size_t len);

/**
 * `‖u‖_{L²}` of the field.
 *
 * # Safety
 * Pointers must be valid or null.
 */
enum Fbo2dStatus fbo2d_field_l2(const struct Fbo2dField *field, double *out);

/**
 * Free linear flow `U(t)` of order `alpha` applied to `field`.
 *
 * # Safety
 * Pointers must be valid or null.
 */
enum Fbo2dStatus fbo2d_propagate(const struct Fbo2dField *field,
                                 double t,
                                 double alpha,
                                 struct Fbo2dField **out);

/**
 * Integrates the full (or, with `nonlinear == 0`, the linear) equation from
 * `field` to `t_end` with step `dt` and returns the final field.
 *
 * # Safety
 * Pointers must be valid or null.
 */
enum Fbo2dStatus fbo2d_solve(const struct Fbo2dField *field,
                             double alpha,
                             double t_end,
                             double dt,
                             int32_t nonlinear,
                             struct Fbo2dField **out);

/**
 * `J(λ)` for order `alpha`, with its extrapolation residual.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum Fbo2dStatus fbo2d_oscillatory_j(double lambda,
                                     double alpha,
                                     double *re,
                                     double *im,
                                     double *residual);

/**
 * Runs experiment `kind` (e.g. `"illposed"`) with a flat JSON config and
 * returns its report. No files are written.
 *
 * # Safety
 * Strings must be NUL-terminated; `out` must be writable.
 */
enum Fbo2dStatus fbo2d_run_experiment(const char *kind,
                                      const char *config_json,
                                      struct Fbo2dReport **out);

/**
 * Releases a report; null is ignored.
 *
 * # Safety
 * `report` must come from this library and not be used afterwards.
 */
void fbo2d_report_free(struct Fbo2dReport *report);

/**
 * 1 if every verdict passed, else 0.
 *
 * # Safety
 * Pointers must be valid or null.
 */
enum Fbo2dStatus fbo2d_report_all_pass(const struct Fbo2dReport *report, int32_t *out);

/**
 * Fitted constant `key` of the report.
 *
 * # Safety
 * `key` must be NUL-terminated; pointers must be valid or null.
 */
enum Fbo2dStatus fbo2d_report_fitted(const struct Fbo2dReport *report,
                                     const char *key,
                                     double *out);

/**
 * CSV body of the report. With a null or short `buf`, returns
 * `BufferTooSmall` and stores the required size in `needed`.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes; `needed` null or writable.
 */
enum Fbo2dStatus fbo2d_report_csv(const struct Fbo2dReport *report,
                                  char *buf,
                                  size_t cap,
                                  size_t *needed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FBO2D_H */
