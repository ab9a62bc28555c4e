#ifndef ORIENT_AVOID_H
#define ORIENT_AVOID_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum OaStatus {
  OA_STATUS_OK = 0,
  // A required pointer was null or a string was not UTF-8.
  OA_STATUS_INVALID_ARGUMENT = 1,
  // The instance text or arrays could not be parsed into a graph.
  OA_STATUS_PARSE_ERROR = 2,
  // Some forbidden set contains two consecutive values, or is everything.
  OA_STATUS_DENSITY_VIOLATION = 3,
  // A vertex or edge index is out of range.
  OA_STATUS_OUT_OF_RANGE = 4,
  // The result has no orientation because none exists.
  OA_STATUS_NO_ORIENTATION = 5,
  // A result file did not check out against its instance.
  OA_STATUS_VERIFY_FAILED = 6,
  // A bug in the solver; the message has details.
  OA_STATUS_INTERNAL = 7,
} OaStatus;

typedef enum OaVerdict {
  OA_VERDICT_EXISTS = 0,
  OA_VERDICT_NOT_EXISTS = 1,
} OaVerdict;

// A multigraph with allowed out-degree sets.
typedef struct OaInstance OaInstance;

// Outcome of [`oa_orient`].
typedef struct OaResult OaResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses an instance in the JSON or edge-list format.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum OaStatus oa_instance_from_json(const char *text, struct OaInstance **out);

// Builds an unconstrained instance from `edge_count` pairs stored flat in
// `edges` (`2 * edge_count` entries).
//
// # Safety
// `edges` must point to `2 * edge_count` readable values (or be null when
// `edge_count` is 0), and `out` must be a valid pointer.
enum OaStatus oa_instance_from_edges(size_t vertex_count,
                                     const size_t *edges,
                                     size_t edge_count,
                                     struct OaInstance **out);

// Replaces `H(vertex)` with the given values. Values above the degree are
// ignored. The instance is unchanged if the new set is not dense.
//
// # Safety
// `inst` must come from this library; `values` must point to `len` values
// (or be null when `len` is 0).
enum OaStatus oa_instance_set_allowed(struct OaInstance *inst,
                                      size_t vertex,
                                      const size_t *values,
                                      size_t len);

// # Safety
// `inst` must come from this library or be null.
size_t oa_instance_vertex_count(const struct OaInstance *inst);

// # Safety
// `inst` must come from this library or be null.
size_t oa_instance_edge_count(const struct OaInstance *inst);

// # Safety
// `inst` must come from this library or be null; it is invalid afterwards.
void oa_instance_free(struct OaInstance *inst);

// Decides existence without constructing anything.
//
// # Safety
// `inst` must come from this library and `out` must be a valid pointer.
enum OaStatus oa_decide(const struct OaInstance *inst, enum OaVerdict *out);

// Builds an orientation or a certificate that none exists.
//
// # Safety
// `inst` must come from this library and `out` must be a valid pointer.
enum OaStatus oa_orient(const struct OaInstance *inst, struct OaResult **out);

// # Safety
// `res` must come from [`oa_orient`].
enum OaVerdict oa_result_verdict(const struct OaResult *res);

// Tail of `edge` in the constructed orientation.
//
// # Safety
// `res` must come from [`oa_orient`] and `tail` must be a valid pointer.
enum OaStatus oa_result_edge_tail(const struct OaResult *res, size_t edge, size_t *tail);

// Result file text; release it with [`oa_string_free`].
//
// # Safety
// `res` must come from [`oa_orient`].
char *oa_result_to_json(const struct OaResult *res);

// # Safety
// `res` must come from [`oa_orient`] or be null; it is invalid afterwards.
void oa_result_free(struct OaResult *res);

// # Safety
// `s` must come from this library or be null; it is invalid afterwards.
void oa_string_free(char *s);

// Checks a result file against `inst`: [`OaStatus::Ok`] if the orientation
// or certificate holds, [`OaStatus::VerifyFailed`] otherwise.
//
// # Safety
// `inst` must come from this library and `json` must be NUL-terminated.
enum OaStatus oa_verify_result_json(const struct OaInstance *inst, const char *json);

// Message for the last failed call on this thread, empty after a success.
// Valid until the next call on the same thread.
const char *oa_last_error_message(void);

// Library version, static.
const char *oa_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORIENT_AVOID_H */
