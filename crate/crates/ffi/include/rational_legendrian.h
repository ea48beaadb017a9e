#ifndef RATIONAL_LEGENDRIAN_H
#define RATIONAL_LEGENDRIAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RlOrder {
  RL_ORDER_ORDERED = 0,
  RL_ORDER_UNORDERED = 1,
  RL_ORDER_UNKNOWN = 2,
} RlOrder;

/**
 * Result codes. Zero is success.
 */
typedef enum RlStatus {
  RL_STATUS_OK = 0,
  RL_STATUS_NULL_ARGUMENT = 1,
  RL_STATUS_INVALID_UTF8 = 2,
  RL_STATUS_PARSE = 3,
  RL_STATUS_UNSUPPORTED = 4,
  RL_STATUS_INCONCLUSIVE = 5,
  RL_STATUS_INTERNAL = 6,
} RlStatus;

/**
 * Opaque link expression.
 */
typedef struct RlExpr RlExpr;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failed call on this thread, or "" after a success.
 * Valid until the next library call on the same thread.
 */
const char *rl_last_error(void);

/**
 * Parses `text` into a new handle stored in `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum RlStatus rl_expr_parse(const char *text, struct RlExpr **out);

/**
 * # Safety
 * `e` must be null or a handle not yet freed.
 */
void rl_expr_free(struct RlExpr *e);

/**
 * Canonical text of the expression.
 *
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
enum RlStatus rl_expr_format(const struct RlExpr *e, char **out);

/**
 * New handle for the swapped expression.
 *
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
enum RlStatus rl_expr_swap(const struct RlExpr *e, struct RlExpr **out);

/**
 * New handle with the proven equivalences applied.
 *
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
enum RlStatus rl_expr_normalize(const struct RlExpr *e, struct RlExpr **out);

/**
 * `p/q` of a single-vector, unswapped expression.
 *
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
enum RlStatus rl_rational(const struct RlExpr *e, char **out);

/**
 * Closed-form Γ⁻ and Γ⁺ in text form.
 *
 * # Safety
 * `e` must be a live handle; `minus` and `plus` writable.
 */
enum RlStatus rl_gamma(const struct RlExpr *e, char **minus, char **plus);

/**
 * Γ⁻ and Γ⁺ counted from the front. `grid = 0` and `tol <= 0` select the defaults.
 *
 * # Safety
 * `e` must be a live handle; `minus` and `plus` writable.
 */
enum RlStatus rl_oracle(const struct RlExpr *e, size_t grid, double tol, char **minus, char **plus);

/**
 * Orderedness verdict; `reason` may be null when not wanted.
 *
 * # Safety
 * `e` must be a live handle, `status` writable, `reason` null or writable.
 */
enum RlStatus rl_orderedness(const struct RlExpr *e, enum RlOrder *status, char **reason);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void rl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RATIONAL_LEGENDRIAN_H */
