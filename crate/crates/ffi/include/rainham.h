#ifndef RAINHAM_H
#define RAINHAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RhStatus {
  RH_STATUS_OK = 0,
  RH_STATUS_NULL_POINTER = 1,
  RH_STATUS_INVALID_ARGUMENT = 2,
  RH_STATUS_MALFORMED = 3,
  RH_STATUS_PRECONDITION = 4,
  RH_STATUS_CAP_EXCEEDED = 5,
  RH_STATUS_NOT_FOUND = 6,
  RH_STATUS_BUDGET_EXHAUSTED = 7,
  RH_STATUS_FAILED = 8,
  RH_STATUS_PANIC = 9,
} RhStatus;

/**
 * Opaque colored family.
 */
typedef struct RhFamily RhFamily;

/**
 * Opaque transversal (Hamilton cycle with one color per edge).
 */
typedef struct RhTransversal RhTransversal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next failing call.
 */
const char *rh_last_error(void);

/**
 * Parses a family from its canonical JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RhStatus rh_family_from_json(const char *json, struct RhFamily **out);

/**
 * Builds a family from a generator spec such as `{"kind":"all-clique","n":8}`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RhStatus rh_family_generate(const char *spec, struct RhFamily **out);

/**
 * Family of `m` edgeless graphs on `n` vertices; fill it with [`rh_family_add_edge`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RhStatus rh_family_new(size_t n, size_t m, struct RhFamily **out);

/**
 * Adds edge `u`–`v` to color `c`.
 *
 * # Safety
 * `f` must be a live handle.
 */
enum RhStatus rh_family_add_edge(struct RhFamily *f, size_t c, size_t u, size_t v);

/**
 * Vertex count, or 0 for NULL.
 *
 * # Safety
 * `f` must be NULL or a live handle.
 */
size_t rh_family_n(const struct RhFamily *f);

/**
 * Color count, or 0 for NULL.
 *
 * # Safety
 * `f` must be NULL or a live handle.
 */
size_t rh_family_m(const struct RhFamily *f);

/**
 * # Safety
 * `f` must be NULL or a handle not yet freed.
 */
void rh_family_free(struct RhFamily *f);

/**
 * Exact search. `RH_STATUS_NOT_FOUND` certifies that none exists;
 * `RH_STATUS_BUDGET_EXHAUSTED` means the node budget ran out first.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum RhStatus rh_find_transversal(const struct RhFamily *f,
                                  uint64_t budget,
                                  struct RhTransversal **out);

/**
 * Randomized transversal along the structural route for the family (desk preset).
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum RhStatus rh_sample_transversal(const struct RhFamily *f,
                                    uint64_t seed,
                                    struct RhTransversal **out);

/**
 * Exact transversal count for `n <= cap`; saturates at `UINT64_MAX`.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum RhStatus rh_count_transversals(const struct RhFamily *f, size_t cap, uint64_t *out);

/**
 * `r(G)` by exhaustive half-set search.
 *
 * # Safety
 * `f` must be a live handle and `out` a valid pointer.
 */
enum RhStatus rh_compute_r(const struct RhFamily *f, uint64_t *out);

/**
 * Number of edges (equal to the number of vertices for a cycle), or 0 for NULL.
 *
 * # Safety
 * `t` must be NULL or a live handle.
 */
size_t rh_transversal_len(const struct RhTransversal *t);

/**
 * Copies vertices and colors into caller buffers of length at least `len`.
 *
 * # Safety
 * `t` must be a live handle; `vertices` and `colors` must hold `len` elements.
 */
enum RhStatus rh_transversal_copy(const struct RhTransversal *t,
                                  size_t *vertices,
                                  size_t *colors,
                                  size_t len);

/**
 * Checks Hamiltonicity, the color bijection and edge membership.
 *
 * # Safety
 * Both handles must be live.
 */
enum RhStatus rh_transversal_validate(const struct RhFamily *f, const struct RhTransversal *t);

/**
 * JSON text of the transversal; release with [`rh_string_free`]. NULL on failure.
 *
 * # Safety
 * `t` must be NULL or a live handle.
 */
char *rh_transversal_to_json(const struct RhTransversal *t);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void rh_string_free(char *s);

/**
 * # Safety
 * `t` must be NULL or a handle not yet freed.
 */
void rh_transversal_free(struct RhTransversal *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RAINHAM_H */
