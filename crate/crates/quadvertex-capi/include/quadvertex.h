#ifndef QUADVERTEX_H
#define QUADVERTEX_H

/* Generated by cbindgen from quadvertex-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes mirroring the command-line exit contract.
typedef enum {
  QV_STATUS_OK = 0,
  QV_STATUS_VERIFY_FAILED = 1,
  QV_STATUS_USAGE = 2,
  QV_STATUS_BUDGET = 3,
  QV_STATUS_INTERNAL = 4,
} QvStatus;

// Opaque handle to a computed series.
typedef struct QvSeries QvSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; do not free.
const char *qv_version(void);

// Message of the most recent error on this thread; do not free. Null when
// no error has occurred.
const char *qv_last_error(void);

// Compute a vertex series.
//
// `mode` is "dt" or "pt"; `legs_json` gives four plane partitions as row
// lists (e.g. `[[[1]],[],[],[]]`); `sign_rule` is "sigma", "dimred" or
// "plus". Returns null on error with `status` and `qv_last_error` set.
//
// # Safety
// `mode`, `legs_json` and `sign_rule` must be valid NUL-terminated strings;
// `status` must be null or a valid pointer.
QvSeries *qv_vertex_series(const char *mode,
                           const char *legs_json,
                           int64_t q_max,
                           const char *sign_rule,
                           QvStatus *status);

// Serialize a series handle to JSON. Free the result with
// [`qv_string_free`].
//
// # Safety
// `series` must be a live handle from [`qv_vertex_series`].
char *qv_series_to_json(const QvSeries *series);

// Exact randomized equality of two series; 1 equal, 0 different, negative
// status code on error.
//
// # Safety
// Both handles must be live.
int32_t qv_series_equal(const QvSeries *a, const QvSeries *b, uint64_t seed, uintptr_t points);

// Release a series handle.
//
// # Safety
// `series` must be a handle from this library, not yet freed; null is a
// no-op.
void qv_series_free(QvSeries *series);

// Release a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed; null is a no-op.
void qv_string_free(char *s);

// Run a verification target ("nekrasov", "dtpt", "conifold", "dimred",
// "coho1", "coho2", "properties") with options as JSON (null for
// defaults). On success writes the JSON report into `report_json` when it
// is non-null (caller frees) and returns `QV_OK` or `QV_VERIFY_FAILED`.
//
// # Safety
// `target` must be a valid NUL-terminated string; `options_json` null or
// valid; `report_json` null or a valid pointer to receive the string.
QvStatus qv_verify(const char *target, const char *options_json, char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUADVERTEX_H */
