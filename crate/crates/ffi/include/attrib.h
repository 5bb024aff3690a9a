#ifndef ATTRIB_H
#define ATTRIB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes; `ATTRIB_STATUS_OK` is zero.
 */
typedef enum AttribStatus {
  ATTRIB_STATUS_OK = 0,
  ATTRIB_STATUS_NULL_POINTER = 1,
  ATTRIB_STATUS_INVALID_UTF8 = 2,
  ATTRIB_STATUS_PARSE = 3,
  ATTRIB_STATUS_DIMENSION = 4,
  ATTRIB_STATUS_DOMAIN = 5,
  ATTRIB_STATUS_NON_CONVERGENCE = 6,
  ATTRIB_STATUS_UNKNOWN_METHOD = 7,
  ATTRIB_STATUS_INVALID_ARGUMENT = 8,
  ATTRIB_STATUS_INTERNAL = 9,
} AttribStatus;

/**
 * Opaque model handle.
 */
typedef struct AttribModel AttribModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a model spec. On success `*out` owns a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum AttribStatus attrib_model_parse(const char *text, struct AttribModel **out);

/**
 * Parses and compiles a DAG model. On success `*out` owns a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum AttribStatus attrib_model_from_dag(const char *text, struct AttribModel **out);

/**
 * Frees a handle; null is ignored.
 *
 * # Safety
 * `model` must be null or a handle from this library that has not been freed.
 */
void attrib_model_free(struct AttribModel *model);

/**
 * Number of variables, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t attrib_model_num_vars(const struct AttribModel *model);

/**
 * Copies the NUL-terminated name of variable `index` into `buf`.
 *
 * `*needed` receives the buffer size required including the terminator.
 * If `cap` is too small nothing is written and `ATTRIB_STATUS_INVALID_ARGUMENT` is returned.
 *
 * # Safety
 * `model` must be a live handle, `buf` writable for `cap` bytes (may be null when `cap` is 0),
 * `needed` null or writable.
 */
enum AttribStatus attrib_model_var_name(const struct AttribModel *model,
                                        size_t index,
                                        char *buf,
                                        size_t cap,
                                        size_t *needed);

/**
 * Attributes `f(s) - f(r)` to the model's variables with `method`
 * (`ass`, `ss-brute`, `as-numeric`, `naive`, `value-variant`, `random-order:<file>`).
 *
 * `r`, `s` and `z_out` hold `n` doubles in variable order. `residual_out`
 * may be null. When numerical integration does not converge the estimate
 * is still written and `ATTRIB_STATUS_NON_CONVERGENCE` is returned.
 *
 * # Safety
 * `model` must be a live handle, `method` a NUL-terminated string, `r` and `s`
 * readable and `z_out` writable for `n` doubles.
 */
enum AttribStatus attrib_attribute(const struct AttribModel *model,
                                   const char *method,
                                   const double *r,
                                   const double *s,
                                   size_t n,
                                   double *z_out,
                                   double *residual_out);

/**
 * Shapley weight `k! (n-1-k)! / n!` for `0 <= k < n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum AttribStatus attrib_shapley_weight(size_t k, size_t n, double *out);

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *attrib_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *attrib_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ATTRIB_H */
