/* C interface for the spillway windowed-aggregation engine. */

#ifndef SPILLWAY_H
#define SPILLWAY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum SpillwayStatus {
  /**
   * The call succeeded; out parameters are filled.
   */
  SpillwayStatus_Ok = 0,
  /**
   * The expression text did not parse or failed frame validation.
   */
  SpillwayStatus_ParseError = 2,
  /**
   * Input data was rejected.
   */
  SpillwayStatus_IngestError = 3,
  /**
   * Spill page I/O failed.
   */
  SpillwayStatus_IoError = 4,
  /**
   * Any other engine error, including internal panics.
   */
  SpillwayStatus_OtherError = 5,
  /**
   * A pointer was null, a length inconsistent, or a parameter zero.
   */
  SpillwayStatus_InvalidArgument = 6,
} SpillwayStatus;

/**
 * Which evaluation strategy ran; mirrors the engine's planner vocabulary.
 */
typedef enum SpillwayStrategy {
  SpillwayStrategy_IncrementalUpdate = 0,
  SpillwayStrategy_RunningExtremum = 1,
  SpillwayStrategy_InMemoryDeque = 2,
  SpillwayStrategy_SpilledDeque = 3,
  SpillwayStrategy_BruteForce = 4,
} SpillwayStrategy;

/**
 * Opaque parsed-expression handle; create with [`spillway_expr_parse`],
 * destroy with [`spillway_expr_free`].
 */
typedef struct SpillwayExpr SpillwayExpr;

/**
 * Operation and I/O counters for one evaluation.
 */
typedef struct SpillwayStats {
  enum SpillwayStrategy strategy;
  uint64_t rows;
  uint64_t add_ops;
  uint64_t remove_ops;
  uint64_t page_reads;
  uint64_t page_writes;
  uint64_t pages_live_peak;
  uint64_t hot_tail_peak;
} SpillwayStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never freed.
 */
const char *spillway_version(void);

/**
 * Message for the most recent failure on this thread, as a NUL-terminated
 * string. Empty until a call fails. The pointer stays valid until the next
 * failing call on the same thread; do not free it.
 */
const char *spillway_last_error_message(void);

/**
 * Parse a window expression such as
 * `"AVG(Score) OVER (ROWS BETWEEN 2 PRECEDING AND 1 FOLLOWING)"`.
 *
 * Returns a handle to pass to the eval calls, or null on failure with the
 * diagnostic (including the byte offset of the first error) available via
 * [`spillway_last_error_message`].
 *
 * # Safety
 * `text` must be a valid NUL-terminated string, readable for its full
 * length, and must stay valid for the duration of the call.
 */
struct SpillwayExpr *spillway_expr_parse(const char *text);

/**
 * Free a handle returned by [`spillway_expr_parse`]. Null is a no-op.
 *
 * # Safety
 * `expr` must be null or a pointer returned by [`spillway_expr_parse`] that
 * has not been freed already.
 */
void spillway_expr_free(struct SpillwayExpr *expr);

/**
 * Canonical result-column header for the expression, e.g. `"AVG(Score)"`,
 * as a freshly allocated NUL-terminated string. Free it with
 * [`spillway_string_free`]. Returns null if `expr` is null.
 *
 * # Safety
 * `expr` must be null or a live handle from [`spillway_expr_parse`].
 */
char *spillway_expr_display(const struct SpillwayExpr *expr);

/**
 * Free a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a pointer returned by [`spillway_expr_display`] that
 * has not been freed already.
 */
void spillway_string_free(char *s);

/**
 * Evaluate `expr` over `len` doubles.
 *
 * `keys` is the ORDER BY column when the expression has one (RANGE frames
 * require it) and may be null otherwise; when present it must also hold
 * `len` values. On success `out_values[i]` holds row `i`'s result and
 * `out_valid[i]` is 1, or `out_valid[i]` is 0 and the value slot is NaN for
 * rows whose frame was empty. `out_stats` may be null.
 *
 * # Safety
 * `data` (and `keys` when non-null) must point to `len` readable values.
 * `out_values` and `out_valid` must point to `len` writable slots. No
 * aliasing constraints beyond the usual: the output arrays must not overlap
 * the inputs. `expr` must be a live handle from [`spillway_expr_parse`].
 */
enum SpillwayStatus spillway_eval_f64(const struct SpillwayExpr *expr,
                                      const double *data,
                                      size_t len,
                                      const double *keys,
                                      size_t memory_budget,
                                      size_t page_size,
                                      double *out_values,
                                      uint8_t *out_valid,
                                      struct SpillwayStats *out_stats);

/**
 * Evaluate `expr` over `len` 64-bit integers. Results are still doubles;
 * see [`spillway_eval_f64`] for the output contract and safety rules.
 *
 * # Safety
 * Identical to [`spillway_eval_f64`], with `data`/`keys` pointing at `i64`.
 */
enum SpillwayStatus spillway_eval_i64(const struct SpillwayExpr *expr,
                                      const int64_t *data,
                                      size_t len,
                                      const int64_t *keys,
                                      size_t memory_budget,
                                      size_t page_size,
                                      double *out_values,
                                      uint8_t *out_valid,
                                      struct SpillwayStats *out_stats);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPILLWAY_H */
