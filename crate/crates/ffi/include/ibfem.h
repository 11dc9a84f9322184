#ifndef IBFEM_H
#define IBFEM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IbfemStatus {
  IBFEM_STATUS_OK = 0,
  IBFEM_STATUS_NULL_POINTER = 1,
  IBFEM_STATUS_INVALID_UTF8 = 2,
  IBFEM_STATUS_CONFIG_ERROR = 3,
  IBFEM_STATUS_BOUNDARY_TOO_CLOSE = 4,
  IBFEM_STATUS_SOLVER_BREAKDOWN = 5,
  IBFEM_STATUS_NUMERIC_ERROR = 6,
  IBFEM_STATUS_IO_ERROR = 7,
  IBFEM_STATUS_OUT_OF_RANGE = 8,
  IBFEM_STATUS_PANIC = 9,
} IbfemStatus;

typedef enum IbfemFormat {
  IBFEM_FORMAT_CSV = 0,
  IBFEM_FORMAT_MARKDOWN = 1,
} IbfemFormat;

typedef enum IbfemProfile {
  IBFEM_PROFILE_COSINE = 0,
  IBFEM_PROFILE_HAT = 1,
} IbfemProfile;

typedef struct IbfemConfig IbfemConfig;

typedef struct IbfemKernel IbfemKernel;

typedef struct IbfemStudy IbfemStudy;

/**
 * One row of a rate table. `rates` is meaningful only when `has_rates` is
 * nonzero (it is zero on the coarsest level).
 */
typedef struct IbfemRateRow {
  double h;
  double errors[3];
  double rates[3];
  int32_t has_rates;
} IbfemRateRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *ibfem_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ibfem_version(void);

/**
 * Parses a TOML study configuration; an empty string gives the defaults.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum IbfemStatus ibfem_config_parse(const char *text, struct IbfemConfig **out);

/**
 * Replaces the mesh ladder, e.g. `{10, 20, 40}`.
 *
 * # Safety
 * `cfg` must come from [`ibfem_config_parse`]; `levels` must point to `len` values.
 */
enum IbfemStatus ibfem_config_set_levels(struct IbfemConfig *cfg, const size_t *levels, size_t len);

/**
 * # Safety
 * `cfg` must be NULL or a pointer from [`ibfem_config_parse`] not yet freed.
 */
void ibfem_config_free(struct IbfemConfig *cfg);

/**
 * Runs the convergence study described by `cfg`.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` a valid pointer.
 */
enum IbfemStatus ibfem_study_run(const struct IbfemConfig *cfg, struct IbfemStudy **out);

/**
 * Number of norm orders (tables) in a study.
 *
 * # Safety
 * `study` must be NULL or a live study handle.
 */
size_t ibfem_study_num_tables(const struct IbfemStudy *study);

/**
 * Number of levels (rows per table).
 *
 * # Safety
 * `study` must be NULL or a live study handle.
 */
size_t ibfem_study_num_rows(const struct IbfemStudy *study);

/**
 * Norm order `r` of table `table`.
 *
 * # Safety
 * `study` must be a live study handle and `out` a valid pointer.
 */
enum IbfemStatus ibfem_study_norm_order(const struct IbfemStudy *study, size_t table, double *out);

/**
 * # Safety
 * `study` must be a live study handle and `out` a valid pointer.
 */
enum IbfemStatus ibfem_study_row(const struct IbfemStudy *study,
                                 size_t table,
                                 size_t row,
                                 struct IbfemRateRow *out);

/**
 * Renders the study as CSV or markdown into a new string that the caller
 * releases with [`ibfem_string_free`].
 *
 * # Safety
 * `study` must be a live study handle and `out` a valid pointer.
 */
enum IbfemStatus ibfem_study_report(const struct IbfemStudy *study,
                                    enum IbfemFormat format,
                                    char **out);

/**
 * # Safety
 * `study` must be NULL or a live study handle.
 */
void ibfem_study_free(struct IbfemStudy *study);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void ibfem_string_free(char *s);

/**
 * Solves level `n` of `cfg` and probes the pressure jump across the circle.
 *
 * # Safety
 * `cfg` must be a live config handle and `out` a valid pointer.
 */
enum IbfemStatus ibfem_pressure_jump(const struct IbfemConfig *cfg, size_t n, double *out);

/**
 * Regularized delta kernel of width `epsilon` in dimension `dim`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum IbfemStatus ibfem_kernel_new(enum IbfemProfile profile,
                                  double epsilon,
                                  size_t dim,
                                  struct IbfemKernel **out);

/**
 * Evaluates the kernel at `y[0..len]`; `len` must equal the kernel dimension.
 *
 * # Safety
 * `kernel` must be live, `y` must point to `len` values and `out` be valid.
 */
enum IbfemStatus ibfem_kernel_eval(const struct IbfemKernel *kernel,
                                   const double *y,
                                   size_t len,
                                   double *out);

/**
 * Zeroth moment of the kernel (one up to quadrature error).
 *
 * # Safety
 * `kernel` must be live and `out` valid.
 */
enum IbfemStatus ibfem_kernel_moment(const struct IbfemKernel *kernel, double *out);

/**
 * # Safety
 * `kernel` must be NULL or a live kernel handle.
 */
void ibfem_kernel_free(struct IbfemKernel *kernel);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IBFEM_H */
