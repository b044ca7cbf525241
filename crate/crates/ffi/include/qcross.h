#ifndef QCROSS_H
#define QCROSS_H

/* Generated by cbindgen from qcross-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible entry point.
 */
typedef enum QcrossStatus {
  QCROSS_STATUS_OK = 0,
  QCROSS_STATUS_INVALID_PARAMETER = 1,
  QCROSS_STATUS_UNSUPPORTED_FIELD = 2,
  QCROSS_STATUS_SIZE_GUARD = 3,
  QCROSS_STATUS_RADICAND_MISMATCH = 4,
  QCROSS_STATUS_DIVISION_BY_ZERO = 5,
  QCROSS_STATUS_SEARCH_EXHAUSTED = 6,
  QCROSS_STATUS_PARSE = 7,
  QCROSS_STATUS_IO = 8,
  QCROSS_STATUS_JSON = 9,
  QCROSS_STATUS_NULL_ARGUMENT = 10,
  QCROSS_STATUS_PANIC = 11,
} QcrossStatus;

/**
 * Opaque handle to a verified dual certificate.
 */
typedef struct QcrossCertificate QcrossCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a dual certificate for the product bound at parameters
 * (q, n, k, l), searching for a feasible multiplier.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 */
enum QcrossStatus qcross_certify(uint64_t q,
                                 int64_t n,
                                 int64_t k,
                                 int64_t l,
                                 struct QcrossCertificate **out);

/**
 * Like `qcross_certify`, but probe the single multiplier `lambda`, given
 * as a decimal fraction string such as "3/16". The call succeeds even when
 * the certificate comes out infeasible; inspect it with
 * `qcross_certificate_feasible`.
 *
 * # Safety
 * `lambda` must point to a NUL-terminated string and `out` to writable
 * storage for one pointer.
 */
enum QcrossStatus qcross_certify_with_lambda(uint64_t q,
                                             int64_t n,
                                             int64_t k,
                                             int64_t l,
                                             const char *lambda,
                                             struct QcrossCertificate **out);

/**
 * Release a certificate handle. Null is ignored.
 *
 * # Safety
 * `cert` must be null or a pointer previously returned through
 * `qcross_certify` / `qcross_certify_with_lambda`, not yet freed.
 */
void qcross_certificate_free(struct QcrossCertificate *cert);

/**
 * 1 if the certificate is feasible, 0 if infeasible, -1 if `cert` is null.
 *
 * # Safety
 * `cert` must be null or a live certificate handle.
 */
int32_t qcross_certificate_feasible(const struct QcrossCertificate *cert);

/**
 * Serialize the full certificate document as pretty-printed JSON.
 *
 * # Safety
 * `cert` must be a live certificate handle and `out` writable storage for
 * one pointer. Free the string with `qcross_string_free`.
 */
enum QcrossStatus qcross_certificate_json(const struct QcrossCertificate *cert, char **out);

/**
 * The certified product bound as a decimal string.
 *
 * # Safety
 * `cert` must be a live certificate handle and `out` writable storage for
 * one pointer. Free the string with `qcross_string_free`.
 */
enum QcrossStatus qcross_certificate_bound(const struct QcrossCertificate *cert, char **out);

/**
 * The multiplier the certificate was verified at, as "p/q".
 *
 * # Safety
 * `cert` must be a live certificate handle and `out` writable storage for
 * one pointer. Free the string with `qcross_string_free`.
 */
enum QcrossStatus qcross_certificate_lambda(const struct QcrossCertificate *cert, char **out);

/**
 * Release a string produced by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string pointer previously written by this library,
 * not yet freed.
 */
void qcross_string_free(char *s);

/**
 * Gaussian binomial coefficient [a, b]_q as a decimal string (zero when
 * a < 0, b < 0 or a < b).
 *
 * # Safety
 * `out` must be writable storage for one pointer. Free the string with
 * `qcross_string_free`.
 */
enum QcrossStatus qcross_gauss(int64_t a, int64_t b, uint64_t q, char **out);

/**
 * Exhaustively maximize |F||G| over cross-intersecting pairs on an explicit
 * lattice, stopping after `budget_seconds`. Writes the search report as
 * JSON; the `exact` field records whether the search completed.
 *
 * # Safety
 * `out` must be writable storage for one pointer. Free the string with
 * `qcross_string_free`.
 */
enum QcrossStatus qcross_max_product(uint64_t q,
                                     int64_t n,
                                     int64_t k,
                                     int64_t l,
                                     uint64_t budget_seconds,
                                     char **out);

/**
 * Verify the incidence identities and harmonic-space lemmas on the explicit
 * lattice of F_q^n, exactly. Writes the combined report as JSON; its `pass`
 * field is the overall verdict.
 *
 * # Safety
 * `out` must be writable storage for one pointer. Free the string with
 * `qcross_string_free`.
 */
enum QcrossStatus qcross_check_identities(uint64_t q, int64_t n, char **out);

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * is owned by the library and valid until the next failing call on the same
 * thread; do not free it.
 */
const char *qcross_last_error_message(void);

/**
 * Library version as a static string; do not free.
 */
const char *qcross_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCROSS_H */
