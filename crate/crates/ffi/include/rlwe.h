#ifndef RLWE_H
#define RLWE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RlweStatus {
  RLWE_STATUS_OK = 0,
  RLWE_STATUS_NULL_POINTER = 1,
  RLWE_STATUS_INVALID_ARGUMENT = 2,
  RLWE_STATUS_INVALID_FAMILY = 3,
  RLWE_STATUS_IO = 4,
  RLWE_STATUS_PARSE = 5,
  RLWE_STATUS_TOO_LARGE = 6,
  RLWE_STATUS_NOT_ENOUGH_SAMPLES = 7,
  RLWE_STATUS_PANIC = 8,
} RlweStatus;

typedef enum RlweAttackKind {
  RLWE_ATTACK_KIND_COSET = 0,
  RLWE_ATTACK_KIND_TWO_BIN = 1,
} RlweAttackKind;

typedef enum RlweVerdict {
  RLWE_VERDICT_GUESS = 0,
  RLWE_VERDICT_NOT_RLWE = 1,
  RLWE_VERDICT_INSUFFICIENT_SAMPLES = 2,
} RlweVerdict;

/**
 * Opaque sample set.
 */
typedef struct RlweSampleSet RlweSampleSet;

typedef struct RlweAttackResult {
  uint32_t verdict;
  /**
   * Non-zero when `candidate_u`, `candidate_v` hold `ρ(s) = u + v√d`.
   */
  uint8_t has_candidate;
  uint64_t candidate_u;
  uint64_t candidate_v;
  size_t candidate_count;
  size_t samples_used;
  uint64_t guess_loop_iterations;
  double threshold;
  uint64_t elapsed_ms;
} RlweAttackResult;

typedef struct RlweEstimate {
  double log2_eps;
  int64_t neg_floor_log2_eps;
  /**
   * NaN when the Gauss-sum bound does not apply (`q ≥ m²`).
   */
  double log2_bound;
  double beta;
} RlweEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *rlwe_last_error(void);

/**
 * Checks `(p, d, q)` against the family conditions.
 */
enum RlweStatus rlwe_validate_family(uint64_t p, uint64_t d, uint64_t q);

/**
 * Draws `count` samples for the family ring `(p, d, q)` with Gaussian width
 * `r`. With `uniform` non-zero the `b` components are uniform instead.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum RlweStatus rlwe_sample_set_generate(uint64_t p,
                                         uint64_t d,
                                         uint64_t q,
                                         double r,
                                         size_t count,
                                         uint64_t seed,
                                         uint8_t uniform,
                                         struct RlweSampleSet **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum RlweStatus rlwe_sample_set_load(const char *path, struct RlweSampleSet **out);

/**
 * # Safety
 * `set` must come from this library; `path` must be NUL-terminated.
 */
enum RlweStatus rlwe_sample_set_save(const struct RlweSampleSet *set, const char *path);

/**
 * Number of records, 0 for a null handle.
 *
 * # Safety
 * `set` must be null or come from this library.
 */
size_t rlwe_sample_set_len(const struct RlweSampleSet *set);

/**
 * Modulus of the set, 0 for a null handle.
 *
 * # Safety
 * `set` must be null or come from this library.
 */
uint64_t rlwe_sample_set_modulus(const struct RlweSampleSet *set);

/**
 * # Safety
 * `set` must be null or come from this library, and not be used afterwards.
 */
void rlwe_sample_set_free(struct RlweSampleSet *set);

/**
 * Runs an attack. A `threshold` of zero or below selects the default
 * critical value; `workers` of 0 uses every core.
 *
 * # Safety
 * `set` must come from this library and `out` be writable.
 */
enum RlweStatus rlwe_attack(const struct RlweSampleSet *set,
                            enum RlweAttackKind kind,
                            double threshold,
                            size_t workers,
                            struct RlweAttackResult *out);

/**
 * `ε(m, q, k)` for residue degree 1 or 2.
 *
 * # Safety
 * `out` must be writable.
 */
enum RlweStatus rlwe_estimate(uint64_t m,
                              uint64_t q,
                              uint32_t k,
                              uint32_t degree,
                              struct RlweEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RLWE_H */
