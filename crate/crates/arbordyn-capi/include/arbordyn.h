#ifndef ARBORDYN_H
#define ARBORDYN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum arb_status {
  ARB_OK = 0,
  ARB_ERR_NULL_ARG = 1,
  ARB_ERR_UTF8 = 2,
  ARB_ERR_PARSE = 3,
  ARB_ERR_UNSUPPORTED = 4,
  ARB_ERR_PANIC = 5,
} arb_status;

/**
 * Opaque handle to a parsed tree.
 */
typedef struct ArbTree {
  uint8_t _private[0];
} ArbTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a tree-spec JSON document into a handle. The handle must be
 * released with arb_tree_free.
 */
enum arb_status arb_tree_from_json(const char *json, struct ArbTree **out);

/**
 * Releases a tree handle. Null is ignored.
 */
void arb_tree_free(struct ArbTree *tree);

/**
 * Number of vertices at the given level, written as a decimal string.
 * The string must be released with arb_string_free.
 */
enum arb_status arb_tree_level_count(const struct ArbTree *tree, uintptr_t level, char **out);

/**
 * Releases a string produced by this library. Null is ignored.
 */
void arb_string_free(char *s);

/**
 * Exact box-counting dimension; fails on trees without a closed form.
 */
enum arb_status arb_minkowski_dim_exact(const struct ArbTree *tree, double *out);

/**
 * Level-count dimension estimate computed down to the given depth.
 */
enum arb_status arb_minkowski_dim_estimate(const struct ArbTree *tree,
                                           uintptr_t depth,
                                           double *out);

/**
 * Hausdorff dimension bracket [lo, hi] from the section bisection.
 */
enum arb_status arb_hausdorff_dim(const struct ArbTree *tree,
                                  uintptr_t cut_floor,
                                  uintptr_t horizon,
                                  double tol,
                                  double *out_lo,
                                  double *out_hi);

/**
 * Generic parameters of a configuration (shorthand like "F2" or "D2,2"),
 * returned as a JSON array string. mode: 0 = upper density, 1 = Banach.
 */
enum arb_status arb_generic_params(const struct ArbTree *tree,
                                   const char *config,
                                   int32_t mode,
                                   uintptr_t m_max,
                                   uintptr_t depth,
                                   char **out);

/**
 * Last error message on this thread, or null if none. The string must be
 * released with arb_string_free.
 */
char *arb_last_error_message(void);

/**
 * Library version as a static string; do not free.
 */
const char *arb_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ARBORDYN_H */
