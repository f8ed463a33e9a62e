#ifndef QKSET_H
#define QKSET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define QK_OK 0

#define QK_ERR_NULL 1

#define QK_ERR_INVALID 2

#define QK_ERR_PARSE 3

#define QK_ERR_NOT_MEMBER 4

#define QK_ERR_STRUCTURAL 5

#define QK_ERR_CAP 6

#define QK_ERR_PANIC 7

/**
 * A classical group with its fixed form.
 */
typedef struct QkGroup QkGroup;

/**
 * A square matrix over the entry field of some group.
 */
typedef struct QkMatrix QkMatrix;

/**
 * A seeded random source.
 */
typedef struct QkRng QkRng;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *qk_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void qk_string_free(char *s);

/**
 * Parses a group such as `"SL:8:2"`, `"SU:7:2"`, `"Sp:6:3"`, `"SO:odd:6:3"`,
 * `"SO:+:4:5"` or `"SO:-:4:5"`.
 *
 * # Safety
 * `spec` must be a nul-terminated string; `out` must be writable.
 */
int32_t qk_group_new(const char *spec, struct QkGroup **out);

/**
 * # Safety
 * `g` must come from `qk_group_new` and not have been freed. Null is ignored.
 */
void qk_group_free(struct QkGroup *g);

/**
 * Dimension of the natural module.
 *
 * # Safety
 * Pointers must be valid.
 */
int32_t qk_group_dimension(const struct QkGroup *g, size_t *out);

/**
 * Group order as a decimal string.
 *
 * # Safety
 * Pointers must be valid.
 */
int32_t qk_group_order(const struct QkGroup *g, char **out);

struct QkRng *qk_rng_new(uint64_t seed);

/**
 * # Safety
 * `r` must come from `qk_rng_new` and not have been freed. Null is ignored.
 */
void qk_rng_free(struct QkRng *r);

/**
 * A uniformly random element of the group.
 *
 * # Safety
 * Pointers must be valid; `rng` must not be used concurrently.
 */
int32_t qk_group_sample(const struct QkGroup *g, struct QkRng *rng, struct QkMatrix **out);

/**
 * Parses a matrix in text form (header `d p e`, then `d` rows) over the
 * entry field of `g`.
 *
 * # Safety
 * Pointers must be valid; `text` nul-terminated.
 */
int32_t qk_matrix_parse(const struct QkGroup *g, const char *text, struct QkMatrix **out);

/**
 * # Safety
 * Pointers must be valid.
 */
int32_t qk_matrix_to_text(const struct QkMatrix *m, char **out);

/**
 * # Safety
 * `m` must come from this library and not have been freed. Null is ignored.
 */
void qk_matrix_free(struct QkMatrix *m);

/**
 * # Safety
 * Pointers must be valid.
 */
int32_t qk_is_member(const struct QkGroup *g, const struct QkMatrix *m, bool *out);

/**
 * Classifies `m` at level `k` (0 picks `k` automatically) and writes the
 * classification as a JSON object.
 *
 * # Safety
 * Pointers must be valid.
 */
int32_t qk_classify(const struct QkGroup *g, const struct QkMatrix *m, size_t k, char **out_json);

/**
 * Runs a scan at level `k` (0 for automatic choice) and writes the JSON
 * report. With `exhaustive`, `samples` is ignored and the whole group is
 * enumerated.
 *
 * # Safety
 * Pointers must be valid.
 */
int32_t qk_scan(const struct QkGroup *g,
                size_t k,
                uint64_t samples,
                uint64_t seed,
                size_t workers,
                bool exhaustive,
                char **out_json);

/**
 * Exact proportion of permutations of `n` points with exactly one
 * `m`-cycle and no other cycle length divisible by `m`, as `"num/den"`.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t qk_b_exact(size_t n, size_t m, char **out);

/**
 * Primitive prime divisors of `q^m - 1` as a JSON array of decimal strings.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t qk_ppd_primes(uint64_t q, uint64_t m, char **out);

/**
 * Library version, a static string.
 */
const char *qk_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QKSET_H */
