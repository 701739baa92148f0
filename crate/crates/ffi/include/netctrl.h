/* C interface for the netctrl target-controllability analysis library. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum NcStatus {
  NC_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  NC_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  NC_INVALID_UTF8 = 2,
  /**
   * The graph or sidecar text failed to parse or validate.
   */
  NC_PARSE_ERROR = 3,
  /**
   * An argument was out of range or dimensionally inconsistent.
   */
  NC_INVALID_ARGUMENT = 4,
  /**
   * A floating-point kernel failed (non-convergence or overflow).
   */
  NC_NUMERIC_ERROR = 5,
  /**
   * Steering refused: the output Gramian is singular.
   */
  NC_SINGULAR_GRAMIAN = 6,
  /**
   * Unexpected internal failure.
   */
  NC_INTERNAL_ERROR = 7,
} NcStatus;

/**
 * Opaque graph handle.
 */
typedef struct NcGraph NcGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never freed.
 */
const char *nc_version(void);

/**
 * Message of the most recent error on this thread. The pointer stays
 * valid until the next failing call on the same thread; do not free it.
 */
const char *nc_last_error(void);

/**
 * Parses a graph from UTF-8 text in the edge-list format and stores a new
 * handle in `out`.
 *
 * # Safety
 * `text` must point to a NUL-terminated string and `out` to a writable
 * pointer slot; on success the caller owns the handle and must release it
 * with [`nc_graph_free`].
 */
enum NcStatus nc_graph_parse(const char *text, struct NcGraph **out);

/**
 * Releases a graph handle; NULL is ignored.
 *
 * # Safety
 * `graph` must be NULL or a handle from [`nc_graph_parse`] not yet freed.
 */
void nc_graph_free(struct NcGraph *graph);

/**
 * Node count of a graph handle; 0 if the handle is NULL.
 *
 * # Safety
 * `graph` must be NULL or a live handle.
 */
size_t nc_graph_node_count(const struct NcGraph *graph);

/**
 * Runs the full analysis and stores the JSON report in `out_json`.
 * `general_linear_json` may be NULL or a sidecar spec for general linear
 * agent dynamics.
 *
 * # Safety
 * `graph` must be a live handle; `out_json` a writable pointer slot; the
 * returned string must be released with [`nc_string_free`].
 */
enum NcStatus nc_analyze_json(const struct NcGraph *graph,
                              const char *general_linear_json,
                              char **out_json);

/**
 * Exit-code style verdict of the full analysis: 0 target controllable,
 * 3 not, -1 on error (see [`nc_last_error`]).
 *
 * # Safety
 * `graph` must be a live handle.
 */
int nc_analyze_verdict(const struct NcGraph *graph);

/**
 * Steers the target outputs to `yf` (length `yf_len` = the target count,
 * for any `order`) from the zero initial state and stores the trajectory
 * CSV in `out_csv`.
 *
 * # Safety
 * `graph` must be a live handle, `yf` must point to `yf_len` doubles,
 * and `out_csv` to a writable pointer slot; release the string with
 * [`nc_string_free`].
 */
enum NcStatus nc_simulate_csv(const struct NcGraph *graph,
                              size_t order,
                              const double *yf,
                              size_t yf_len,
                              double tf,
                              size_t steps,
                              char **out_csv);

/**
 * Releases a string returned by this library; NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library not yet freed.
 */
void nc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
