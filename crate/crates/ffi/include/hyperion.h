#ifndef HYPERION_H
#define HYPERION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HyperionStatus {
  HYPERION_STATUS_OK = 0,
  HYPERION_STATUS_NULL_POINTER = 1,
  HYPERION_STATUS_INVALID_ARGUMENT = 2,
  HYPERION_STATUS_UNKNOWN_THEOREM = 3,
  HYPERION_STATUS_INTEGRATION_FAILED = 4,
  HYPERION_STATUS_PANIC = 5,
} HyperionStatus;

/**
 * Proof engine with its parameters and image cache.
 */
typedef struct HyperionProver HyperionProver;

/**
 * Result of one theorem.
 */
typedef struct HyperionReport HyperionReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *hyperion_last_error(void);

/**
 * Creates a prover for the eccentricity `e` and `omega2`, both decimal
 * strings; null selects the default value.
 *
 * # Safety
 * `e` and `omega2` are null or NUL-terminated strings; `out` is writable.
 */
enum HyperionStatus hyperion_prover_new(const char *e,
                                        const char *omega2,
                                        struct HyperionProver **out);

/**
 * # Safety
 * `p` is null or a handle from [`hyperion_prover_new`] not yet freed.
 */
void hyperion_prover_free(struct HyperionProver *p);

/**
 * Runs the theorem `id` (`p1p2`, `p1p1`, `p2p2`, `p3p3`, `p1p3`, `p2p3`).
 * A failed verification is not an error: inspect the report's verdict.
 *
 * # Safety
 * `p` is a live prover, `id` a NUL-terminated string, `out` writable.
 */
enum HyperionStatus hyperion_prove_theorem(const struct HyperionProver *p,
                                           const char *id,
                                           struct HyperionReport **out);

/**
 * 1 if the theorem was proved, 0 if not, -1 for a null report.
 *
 * # Safety
 * `r` is null or a live report.
 */
int32_t hyperion_report_proved(const struct HyperionReport *r);

/**
 * Number of covering certificates (forward and derived), 0 for null.
 *
 * # Safety
 * `r` is null or a live report.
 */
size_t hyperion_report_certificate_count(const struct HyperionReport *r);

/**
 * The certificate document as JSON; free with [`hyperion_string_free`].
 * Null for a null report.
 *
 * # Safety
 * `r` is null or a live report.
 */
char *hyperion_report_json(const struct HyperionReport *r);

/**
 * # Safety
 * `r` is null or a report not yet freed.
 */
void hyperion_report_free(struct HyperionReport *r);

/**
 * Fixed-point proofs of P1, P2, P3 as a JSON document in `*json`; the
 * verdict in `*proved` (1 or 0).
 *
 * # Safety
 * `p` is a live prover; `json` and `proved` are writable.
 */
enum HyperionStatus hyperion_prove_fixed_points(const struct HyperionProver *p,
                                                char **json,
                                                int32_t *proved);

/**
 * Rigorous enclosure of `P^k` of the box `[theta_lo, theta_hi] x
 * [phi_lo, phi_hi]`, written to `out` as `theta_lo, theta_hi, phi_lo,
 * phi_hi` (theta not reduced).
 *
 * # Safety
 * `p` is a live prover; `out` points to four writable doubles.
 */
enum HyperionStatus hyperion_poincare_map(const struct HyperionProver *p,
                                          double theta_lo,
                                          double theta_hi,
                                          double phi_lo,
                                          double phi_hi,
                                          uint32_t k,
                                          double *out);

/**
 * # Safety
 * `s` is null or a string returned by this library, not yet freed.
 */
void hyperion_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERION_H */
