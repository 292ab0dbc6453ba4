/* C interface to the tgr term-graph library. */

#ifndef TGR_H
#define TGR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call across the C boundary.
 */
typedef enum TgrStatus {
  /**
   * The call succeeded and the queried property holds.
   */
  TgrStatus_Ok = 0,
  /**
   * The call succeeded but the queried property does not hold.
   */
  TgrStatus_PropertyFails = 1,
  /**
   * The input text did not parse or validate.
   */
  TgrStatus_ParseError = 2,
  /**
   * A graph, rule, precedence, or sequence name is not defined.
   */
  TgrStatus_UnknownName = 3,
  /**
   * An argument value (variant, order, strategy, null pointer) is invalid.
   */
  TgrStatus_InvalidArgument = 4,
  /**
   * The underlying analysis reported an error.
   */
  TgrStatus_EvaluationError = 5,
} TgrStatus;

/**
 * Opaque handle to a parsed workspace.
 */
typedef struct TgrWorkspace TgrWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The most recent error message on this thread, or null. The caller owns
 * the returned string and must release it with [`tgr_string_free`].
 */
char *tgr_last_error(void);

/**
 * Release a string allocated by this library.
 *
 * # Safety
 * `s` must be a pointer previously returned by a `tgr_*` function and not
 * yet freed; null is accepted and ignored.
 */
void tgr_string_free(char *s);

/**
 * Parse workspace text. On success stores a fresh handle in `out` and
 * returns `Ok`.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be a valid
 * location to store a pointer.
 */
enum TgrStatus tgr_workspace_parse(const char *text, struct TgrWorkspace **out);

/**
 * Release a workspace handle.
 *
 * # Safety
 * `ws` must be a handle from [`tgr_workspace_parse`] not yet freed; null is
 * accepted and ignored.
 */
void tgr_workspace_free(struct TgrWorkspace *ws);

/**
 * Canonical text of the workspace.
 *
 * # Safety
 * `ws` must be a live workspace handle; `out` a valid store location.
 */
enum TgrStatus tgr_workspace_print(const struct TgrWorkspace *ws, char **out);

/**
 * Does `larger` embed `smaller` under the named precedence and variant
 * (`final`, `attempt1`, `attempt2`)? JSON result in `out`.
 *
 * # Safety
 * All pointers must be valid as described on [`tgr_workspace_parse`].
 */
enum TgrStatus tgr_embed(const struct TgrWorkspace *ws,
                         const char *prec,
                         const char *larger,
                         const char *smaller,
                         const char *variant,
                         char **out);

/**
 * Does `from` collapse to `to`? JSON result in `out`.
 *
 * # Safety
 * All pointers must be valid as described on [`tgr_workspace_parse`].
 */
enum TgrStatus tgr_collapse(const struct TgrWorkspace *ws,
                            const char *from,
                            const char *to,
                            char **out);

/**
 * Are two graphs isomorphic?
 *
 * # Safety
 * All pointers must be valid as described on [`tgr_workspace_parse`].
 */
enum TgrStatus tgr_iso(const struct TgrWorkspace *ws,
                       const char *left,
                       const char *right,
                       char **out);

/**
 * Is `smaller` strictly below `larger` in the path order?
 *
 * # Safety
 * All pointers must be valid as described on [`tgr_workspace_parse`].
 */
enum TgrStatus tgr_lpo(const struct TgrWorkspace *ws,
                       const char *prec,
                       const char *smaller,
                       const char *larger,
                       char **out);

/**
 * Orient all rules of the workspace; `order` is `lpo` or `embedding`.
 * Returns `Ok` when every rule is decreasing.
 *
 * # Safety
 * All pointers must be valid as described on [`tgr_workspace_parse`].
 */
enum TgrStatus tgr_orient(const struct TgrWorkspace *ws,
                          const char *prec,
                          const char *order,
                          bool vars_as_constants,
                          char **out);

/**
 * Derive from a graph with the workspace rules; `strategy` is
 * `leftmost-first` or `all-first`. Always `Ok` on success, with the
 * terminal status in the JSON payload.
 *
 * # Safety
 * All pointers must be valid as described on [`tgr_workspace_parse`].
 */
enum TgrStatus tgr_rewrite(const struct TgrWorkspace *ws,
                           const char *graph,
                           const char *strategy,
                           size_t max_steps,
                           char **out);

/**
 * Derive and certify every step for strict descent; `order` is `lpo` or
 * `embedding`. `Ok` when the derivation is descending.
 *
 * # Safety
 * All pointers must be valid as described on [`tgr_workspace_parse`].
 */
enum TgrStatus tgr_certify(const struct TgrWorkspace *ws,
                           const char *graph,
                           const char *prec,
                           const char *order,
                           size_t max_steps,
                           char **out);

/**
 * Find the least good pair of a declared sequence. `Ok` when one exists.
 *
 * # Safety
 * All pointers must be valid as described on [`tgr_workspace_parse`].
 */
enum TgrStatus tgr_good_pair(const struct TgrWorkspace *ws,
                             const char *sequence,
                             const char *prec,
                             char **out);

/**
 * The built-in fixture file text; release with [`tgr_string_free`].
 */
char *tgr_fixtures(void);

/**
 * Library version as a static string; do not free.
 */
const char *tgr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TGR_H */
