#ifndef HODP_H
#define HODP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HodpStatus {
  HODP_STATUS_OK = 0,
  HODP_STATUS_NULL_POINTER = 1,
  HODP_STATUS_INVALID_UTF8 = 2,
  HODP_STATUS_SYNTAX = 3,
  HODP_STATUS_TYPE = 4,
  HODP_STATUS_INFERENCE_AMBIGUITY = 5,
  HODP_STATUS_MALFORMED_LHS = 6,
  /**
   * Any other problem with the input: duplicate or unknown symbols,
   * cyclic precedences, bad positions.
   */
  HODP_STATUS_INVALID_INPUT = 7,
  HODP_STATUS_RESOURCE_LIMIT = 8,
  HODP_STATUS_PANIC = 9,
} HodpStatus;

typedef enum HodpVerdict {
  HODP_VERDICT_YES = 0,
  HODP_VERDICT_NO = 1,
  HODP_VERDICT_MAYBE = 2,
} HodpVerdict;

typedef enum HodpFormat {
  HODP_FORMAT_TEXT = 0,
  HODP_FORMAT_TEXT_TRACE = 1,
  HODP_FORMAT_JSON = 2,
} HodpFormat;

/**
 * The result of an analysis.
 */
typedef struct HodpReport HodpReport;

/**
 * A parsed and type-checked rewrite system.
 */
typedef struct HodpSystem HodpSystem;

/**
 * Analysis options; obtain defaults from [`hodp_options_default`].
 */
typedef struct HodpOptions {
  /**
   * Fixed precedence such as `"f>g,f>h"`, or null to search.
   */
  const char *precedence;
  uint32_t max_symbols;
  uint32_t ge_bound;
  bool disprove;
  uint32_t explore_depth;
  uint32_t explore_nodes;
  /**
   * Restrict internal chain steps to rule steps.
   */
  bool rules_only;
} HodpOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

struct HodpOptions hodp_options_default(void);

/**
 * Parses a system in the line-oriented input format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HodpStatus hodp_system_parse(const char *text, struct HodpSystem **out);

/**
 * Number of rules, or 0 for a null handle.
 *
 * # Safety
 * `system` must be null or a handle from [`hodp_system_parse`].
 */
size_t hodp_system_rule_count(const struct HodpSystem *system);

/**
 * # Safety
 * `system` must be null or a handle from [`hodp_system_parse`] not yet freed.
 */
void hodp_system_free(struct HodpSystem *system);

/**
 * Runs the analysis. `options` may be null for the defaults.
 *
 * # Safety
 * `system` must be a live handle, `options` null or valid, `out` valid.
 */
enum HodpStatus hodp_analyze(const struct HodpSystem *system,
                             const struct HodpOptions *options,
                             struct HodpReport **out);

/**
 * Verdict of a report; `Maybe` for a null handle.
 *
 * # Safety
 * `report` must be null or a live handle from [`hodp_analyze`].
 */
enum HodpVerdict hodp_report_verdict(const struct HodpReport *report);

/**
 * Renders a report; the string must be released with [`hodp_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum HodpStatus hodp_report_render(const struct HodpReport *report,
                                   enum HodpFormat format,
                                   char **out);

/**
 * # Safety
 * `report` must be null or a handle from [`hodp_analyze`] not yet freed.
 */
void hodp_report_free(struct HodpReport *report);

/**
 * Message of the last failure on this thread, or null. The string must be
 * released with [`hodp_string_free`].
 */
char *hodp_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void hodp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HODP_H */
