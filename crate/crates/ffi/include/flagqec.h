#ifndef FLAGQEC_H
#define FLAGQEC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Zero is success.
 */
typedef enum FlagqecStatus {
  FLAGQEC_STATUS_OK = 0,
  FLAGQEC_STATUS_NULL_POINTER = 1,
  FLAGQEC_STATUS_INVALID_UTF8 = 2,
  FLAGQEC_STATUS_UNKNOWN_PROTOCOL = 3,
  FLAGQEC_STATUS_UNKNOWN_BRANCH = 4,
  FLAGQEC_STATUS_INVALID_ARGUMENT = 5,
  FLAGQEC_STATUS_NO_BRACKET = 6,
  FLAGQEC_STATUS_INTERNAL = 7,
} FlagqecStatus;

/**
 * Opaque protocol handle.
 */
typedef struct FlagqecProtocol FlagqecProtocol;

/**
 * One Monte Carlo grid point, as written to the sweep CSV.
 */
typedef struct FlagqecSweepPoint {
  double p;
  uint64_t trials;
  uint64_t failures;
  double p_l;
  double ci_low;
  double ci_high;
} FlagqecSweepPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code. Never null.
 */
const char *flagqec_status_message(enum FlagqecStatus status);

/**
 * Builds a shipped protocol and its lookup tables.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum FlagqecStatus flagqec_protocol_new(const char *name, struct FlagqecProtocol **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `p` must come from [`flagqec_protocol_new`] and not be used afterwards.
 */
void flagqec_protocol_free(struct FlagqecProtocol *p);

/**
 * Number of physical data qubits of the protocol's code.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum FlagqecStatus flagqec_protocol_num_qubits(const struct FlagqecProtocol *p, uint32_t *out);

/**
 * Replays every single fault and reports the scenario and violation counts.
 *
 * # Safety
 * `p` must be a live handle; both out-pointers writable.
 */
enum FlagqecStatus flagqec_protocol_verify(const struct FlagqecProtocol *p,
                                           uint64_t *scenarios,
                                           uint64_t *violations);

/**
 * Worst-case two-qubit gate total on routes ending in `branch`.
 *
 * # Safety
 * `p` must be a live handle, `branch` NUL-terminated, `out` writable.
 */
enum FlagqecStatus flagqec_protocol_gate_count(const struct FlagqecProtocol *p,
                                               const char *branch,
                                               uint64_t *out);

/**
 * One noisy trial. `failed` is set to 1 on a logical error, else 0.
 *
 * # Safety
 * `p` must be a live handle and `failed` writable.
 */
enum FlagqecStatus flagqec_run_trial(const struct FlagqecProtocol *p,
                                     double phys,
                                     uint64_t trial,
                                     uint64_t seed,
                                     uint8_t *failed);

/**
 * Runs `trials` trials at each of the `len` rates in `ps`, writing one
 * point per rate into `out`.
 *
 * # Safety
 * `ps` and `out` must each hold `len` elements.
 */
enum FlagqecStatus flagqec_sweep(const struct FlagqecProtocol *p,
                                 const double *ps,
                                 size_t len,
                                 uint64_t trials,
                                 uint64_t seed,
                                 uint32_t workers,
                                 struct FlagqecSweepPoint *out);

/**
 * Crossing of `p_L` with `p` over `len` sweep points.
 *
 * # Safety
 * `points` must hold `len` elements and `p_star` be writable.
 */
enum FlagqecStatus flagqec_pseudothreshold(const struct FlagqecSweepPoint *points,
                                           size_t len,
                                           double *p_star);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLAGQEC_H */
