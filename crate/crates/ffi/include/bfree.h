#ifndef BFREE_H
#define BFREE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Values 2..=4 match the CLI exit codes.
 */
typedef enum BfreeStatus {
  BFREE_STATUS_OK = 0,
  BFREE_STATUS_NULL_POINTER = 1,
  BFREE_STATUS_PARSE = 2,
  BFREE_STATUS_BUDGET = 3,
  BFREE_STATUS_PRECONDITION = 4,
  BFREE_STATUS_IO = 5,
  BFREE_STATUS_INVALID_UTF8 = 6,
  BFREE_STATUS_PANIC = 7,
} BfreeStatus;

/**
 * A primitive set of moduli.
 */
typedef struct BfreeBSet BfreeBSet;

/**
 * A bit-packed stretch of the B-free indicator.
 */
typedef struct BfreeSegment BfreeSegment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next call into the library on this thread.
 */
const char *bfree_last_error(void);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void bfree_string_free(char *s);

/**
 * Primitivize `values[0..len]` into a new set.
 *
 * # Safety
 * `values` must point to `len` readable integers (may be NULL if `len` is 0).
 */
enum BfreeStatus bfree_bset_from_values(const uint64_t *values, size_t len, struct BfreeBSet **out);

/**
 * Expand a family spec such as `prime_squares:10000`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum BfreeStatus bfree_bset_from_family(const char *spec, struct BfreeBSet **out);

/**
 * Number of moduli; 0 for NULL.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t bfree_bset_len(const struct BfreeBSet *set);

/**
 * Copy up to `cap` moduli (ascending) into `buf`; returns the total count.
 *
 * # Safety
 * `set` must be NULL or a live handle; `buf` must hold `cap` integers.
 */
size_t bfree_bset_values(const struct BfreeBSet *set, uint64_t *buf, size_t cap);

/**
 * # Safety
 * `set` must be NULL or a handle not yet freed.
 */
void bfree_bset_free(struct BfreeBSet *set);

/**
 * Exact density of M_B as `"num/den"` (free with `bfree_string_free`)
 * and as a double. Either output may be NULL.
 *
 * # Safety
 * `set` must be a live handle.
 */
enum BfreeStatus bfree_exact_density(const struct BfreeBSet *set, char **ratio, double *value);

/**
 * Haar measure of the window on `Z/lcm(B)` as `"num/den"`.
 *
 * # Safety
 * `set` must be a live handle; `ratio` must be writable.
 */
enum BfreeStatus bfree_window_measure(const struct BfreeBSet *set, char **ratio);

/**
 * `|M_B ∩ [1, n]| / n`.
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum BfreeStatus bfree_natural_density(const struct BfreeBSet *set, uint64_t n, double *out);

/**
 * Logarithmic density estimate at window `n >= 2`.
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum BfreeStatus bfree_log_density(const struct BfreeBSet *set, uint64_t n, double *out);

/**
 * Sieve the B-free indicator on `[start, start + len)`.
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum BfreeStatus bfree_sieve(const struct BfreeBSet *set,
                             int64_t start,
                             uint64_t len,
                             struct BfreeSegment **out);

/**
 * # Safety
 * `seg` must be NULL or a live handle.
 */
uint64_t bfree_segment_len(const struct BfreeSegment *seg);

/**
 * # Safety
 * `seg` must be NULL or a live handle.
 */
int64_t bfree_segment_start(const struct BfreeSegment *seg);

/**
 * Bit `i` (1 = B-free).
 *
 * # Safety
 * `seg` must be a live handle; `out` must be writable.
 */
enum BfreeStatus bfree_segment_get(const struct BfreeSegment *seg, uint64_t i, bool *out);

/**
 * Number of B-free positions.
 *
 * # Safety
 * `seg` must be NULL or a live handle.
 */
uint64_t bfree_segment_count_ones(const struct BfreeSegment *seg);

/**
 * Longest run of multiples.
 *
 * # Safety
 * `seg` must be NULL or a live handle.
 */
uint64_t bfree_segment_max_zero_run(const struct BfreeSegment *seg);

/**
 * Binary dump: `start` (i64 LE), `len` (u64 LE), then bits LSB first.
 * Copies up to `cap` bytes and stores the full size in `needed`.
 *
 * # Safety
 * `seg` must be a live handle; `buf` must hold `cap` bytes (or be NULL);
 * `needed` must be writable.
 */
enum BfreeStatus bfree_segment_serialize(const struct BfreeSegment *seg,
                                         uint8_t *buf,
                                         size_t cap,
                                         size_t *needed);

/**
 * # Safety
 * `seg` must be NULL or a handle not yet freed.
 */
void bfree_segment_free(struct BfreeSegment *seg);

/**
 * Run a command described by a JSON run config (the `config` object of a
 * CLI JSON report) and return the JSON report.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out` must be writable.
 */
enum BfreeStatus bfree_run_json(const char *config_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BFREE_H */
