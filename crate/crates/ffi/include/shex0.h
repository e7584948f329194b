#ifndef SHEX0_H
#define SHEX0_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum shex0_status {
  SHEX0_STATUS_OK = 0,
  SHEX0_STATUS_NULL_ARGUMENT = 1,
  SHEX0_STATUS_INVALID_UTF8 = 2,
  SHEX0_STATUS_PARSE_ERROR = 3,
  SHEX0_STATUS_ANALYSIS_ERROR = 4,
  SHEX0_STATUS_INVALID_ARGUMENT = 5,
  SHEX0_STATUS_PANIC = 6,
} shex0_status;

typedef enum shex0_mode {
  SHEX0_MODE_WITNESS = 0,
  SHEX0_MODE_STRICT = 1,
} shex0_mode;

/**
 * Opaque typed graph.
 */
typedef struct shex0_graph shex0_graph;

/**
 * Opaque shape graph, with its optional base order header.
 */
typedef struct shex0_schema shex0_schema;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *shex0_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void shex0_string_free(char *s);

/**
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum shex0_status shex0_schema_parse(const char *text, struct shex0_schema **out);

/**
 * # Safety
 * `schema` must be null or a handle from this library, not yet freed.
 */
void shex0_schema_free(struct shex0_schema *schema);

/**
 * Text form of the schema, or null when `schema` is null.
 *
 * # Safety
 * `schema` must be null or a live handle.
 */
char *shex0_schema_to_string(const struct shex0_schema *schema);

/**
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum shex0_status shex0_graph_parse(const char *text, struct shex0_graph **out);

/**
 * # Safety
 * `graph` must be null or a handle from this library, not yet freed.
 */
void shex0_graph_free(struct shex0_graph *graph);

/**
 * # Safety
 * `graph` must be null or a live handle.
 */
char *shex0_graph_to_string(const struct shex0_graph *graph);

/**
 * Stores in `valid` whether `graph` conforms to `schema`. Details of the
 * first violation go to the last-error slot.
 *
 * # Safety
 * Handles must be live; `valid` must be a valid pointer.
 */
enum shex0_status shex0_validate(const struct shex0_graph *graph,
                                 const struct shex0_schema *schema,
                                 enum shex0_mode mode,
                                 bool *valid);

/**
 * Infers a schema from `graph`. `order` is null or one type name per line,
 * used to break ties between types.
 *
 * # Safety
 * `graph` must be live, `order` null or a valid string, `out` valid.
 */
enum shex0_status shex0_infer(const struct shex0_graph *graph,
                              const char *order,
                              struct shex0_schema **out);

/**
 * Canonical form of `schema`. The typesets come from `typesets` when it is
 * not null, otherwise from a bounded search of depth `search_depth` (0 for
 * the default). The base order is the schema's own header.
 *
 * # Safety
 * `schema` must be live, `typesets` null or live, `out` valid.
 */
enum shex0_status shex0_canonize(const struct shex0_schema *schema,
                                 const struct shex0_graph *typesets,
                                 uint32_t search_depth,
                                 struct shex0_schema **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHEX0_H */
