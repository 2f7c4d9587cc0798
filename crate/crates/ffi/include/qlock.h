#ifndef QLOCK_H
#define QLOCK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QlockStatus {
  QLOCK_STATUS_OK = 0,
  QLOCK_STATUS_NULL_POINTER = 1,
  QLOCK_STATUS_INVALID_ARGUMENT = 2,
  QLOCK_STATUS_PARSE = 3,
  /**
   * A quantifier's precondition does not hold (wrong dimensions,
   * degenerate levels, marginal not maximally mixed).
   */
  QLOCK_STATUS_PRECONDITION = 4,
  QLOCK_STATUS_NUMERICAL = 5,
  QLOCK_STATUS_PANIC = 6,
} QlockStatus;

typedef enum QlockMethod {
  QLOCK_METHOD_THEOREM3_GRID = 0,
  QLOCK_METHOD_COROLLARY1_CLOSED_FORM = 1,
  QLOCK_METHOD_BRUTEFORCE_SU2 = 2,
} QlockMethod;

/**
 * Opaque additive observable O₁⊗I + I⊗O₂.
 */
typedef struct QlockObservable QlockObservable;

/**
 * Opaque bipartite density operator.
 */
typedef struct QlockState QlockState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *qlock_version(void);

/**
 * Message of the last failing call on this thread, or an empty string.
 * Valid until the next failing call on the same thread.
 */
const char *qlock_last_error_message(void);

/**
 * Parses a state in the JSON state schema.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum QlockStatus qlock_state_from_json(const char *json, struct QlockState **out);

/**
 * Builds a state on C^{d1} ⊗ C^{d2} from row-major parts of length
 * (d1·d2)². `im` may be null for a real matrix.
 *
 * # Safety
 * `re` (and `im` if non-null) must point to (d1·d2)² doubles; `out` writable.
 */
enum QlockStatus qlock_state_from_matrix(const double *re,
                                         const double *im,
                                         size_t d1,
                                         size_t d2,
                                         struct QlockState **out);

/**
 * α|ψ−⟩⟨ψ−| + (1−α)I/4 for α in [0, 1].
 *
 * # Safety
 * `out` must be writable.
 */
enum QlockStatus qlock_state_werner(double alpha, struct QlockState **out);

/**
 * # Safety
 * `state` must be null or a handle from this library not yet freed.
 */
void qlock_state_free(struct QlockState *state);

/**
 * # Safety
 * `state` must be a live handle; `d1` and `d2` writable.
 */
enum QlockStatus qlock_state_dims(const struct QlockState *state, size_t *d1, size_t *d2);

/**
 * Serializes the state; release the string with [`qlock_string_free`].
 *
 * # Safety
 * `state` must be a live handle; `out` writable.
 */
enum QlockStatus qlock_state_to_json(const struct QlockState *state, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void qlock_string_free(char *s);

/**
 * diag(0, ε₁) ⊗ I + I ⊗ diag(0, ε₂).
 *
 * # Safety
 * `out` must be writable.
 */
enum QlockStatus qlock_observable_from_gaps(double eps1, double eps2, struct QlockObservable **out);

/**
 * Diagonal two-qubit observable with `levels` in computational order
 * |00⟩, |01⟩, |10⟩, |11⟩. Fails unless the levels are additive.
 *
 * # Safety
 * `levels` must point to 4 doubles; `out` writable.
 */
enum QlockStatus qlock_observable_from_levels(const double *levels, struct QlockObservable **out);

/**
 * # Safety
 * `obs` must be null or a handle from this library not yet freed.
 */
void qlock_observable_free(struct QlockObservable *obs);

/**
 * Observable locking of a two-qubit state. `grid_points = 0` keeps the
 * default budget of the chosen method.
 *
 * # Safety
 * `state` and `obs` must be live handles; `value` writable.
 */
enum QlockStatus qlock_observable_locking(const struct QlockState *state,
                                          const struct QlockObservable *obs,
                                          enum QlockMethod method,
                                          uint64_t seed,
                                          size_t grid_points,
                                          double *value);

/**
 * Entropic discord in bits, measuring the first qubit.
 *
 * # Safety
 * `state` must be a live handle; `value` writable.
 */
enum QlockStatus qlock_discord(const struct QlockState *state, uint64_t seed, double *value);

/**
 * S(ρ₁) + S(ρ₂) − S(ρ) in bits.
 *
 * # Safety
 * `state` must be a live handle; `value` writable.
 */
enum QlockStatus qlock_mutual_information(const struct QlockState *state, double *value);

/**
 * Whether the state is classical on its first factor. `tol <= 0` uses the
 * library default.
 *
 * # Safety
 * `state` must be a live handle; `result` writable.
 */
enum QlockStatus qlock_is_cq(const struct QlockState *state, double tol, bool *result);

/**
 * Purity that free classical channels on the first qubit cannot unlock.
 * Requires a maximally mixed first marginal.
 *
 * # Safety
 * `state` must be a live handle; `value` writable.
 */
enum QlockStatus qlock_purity_locking(const struct QlockState *state, uint64_t seed, double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QLOCK_H */
