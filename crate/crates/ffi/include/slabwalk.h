#ifndef SLABWALK_H
#define SLABWALK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by every fallible function.
 */
typedef enum SwStatus {
  SW_STATUS_OK = 0,
  SW_STATUS_NULL_ARGUMENT = 1,
  SW_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The requested box or schedule exceeds a size guard.
   */
  SW_STATUS_RESOURCE_LIMIT = 3,
  /**
   * `t_max` lies beyond the exactness horizon.
   */
  SW_STATUS_HORIZON_SHORTFALL = 4,
  SW_STATUS_BUFFER_TOO_SMALL = 5,
  SW_STATUS_INTERNAL = 6,
} SwStatus;

/**
 * Opaque graph handle.
 */
typedef struct SwGraph SwGraph;

/**
 * Escape probability bounds from a finite horizon.
 */
typedef struct SwEscape {
  double lower;
  double upper;
  double point;
  /**
   * Bound on the unseen tail of the Green function; infinite in `d <= 2`.
   */
  double tail;
  /**
   * Nonzero when the tail bound is at least 1 and `lower` is vacuous.
   */
  uint8_t horizon_too_small;
} SwEscape;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty after a
 * success. The pointer stays valid until the next call on the same thread.
 */
const char *sw_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sw_version(void);

/**
 * The box `[-radius, radius]^d` of `Z^d` with the origin as `x`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum SwStatus sw_graph_lattice(size_t d, int64_t radius, struct SwGraph **out);

/**
 * The `H` half (or, with `clamped != 0`, the `F` graph) of the given
 * parity for the schedule with periods `periods[0..n_periods]`, built
 * inside `[-radius, radius]^d`. `parity` is 0 for even and 1 for odd.
 *
 * # Safety
 * `periods` must point to `n_periods` readable values and `out` to
 * writable storage for a handle.
 */
enum SwStatus sw_graph_half(size_t d,
                            size_t s,
                            const uint64_t *periods,
                            size_t n_periods,
                            uint32_t parity,
                            uint8_t clamped,
                            int64_t radius,
                            struct SwGraph **out);

/**
 * Joins the origins of `even` and `odd` by one edge of weight `delta`, or
 * by a path of `segment` unit edges when `segment > 0`. The inputs are not
 * consumed.
 *
 * # Safety
 * `even` and `odd` must be live handles and `out` writable.
 */
enum SwStatus sw_graph_glue(const struct SwGraph *even,
                            const struct SwGraph *odd,
                            double delta,
                            size_t segment,
                            struct SwGraph **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `g` must be null or a handle not yet freed.
 */
void sw_graph_free(struct SwGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t sw_graph_vertex_count(const struct SwGraph *g);

/**
 * The `x` and `y` markers. A missing `y` is reported as `SIZE_MAX`.
 *
 * # Safety
 * `g` must be a live handle; `x` and `y` writable.
 */
enum SwStatus sw_graph_markers(const struct SwGraph *g, size_t *x, size_t *y);

/**
 * Exactness horizon of kernels started at `v`; `SIZE_MAX` when nothing
 * reachable was truncated.
 *
 * # Safety
 * `g` must be a live handle; `out` writable.
 */
enum SwStatus sw_exact_horizon(const struct SwGraph *g, size_t v, size_t *out);

/**
 * `p(v,v;t)` for `t = 0..=t_max` into `buf`. `lazy != 0` selects the lazy
 * walk. Values past the exactness horizon are written but flagged by
 * `HorizonShortfall` unless `allow_approximate != 0`.
 *
 * # Safety
 * `g` must be a live handle and `buf` must hold `len` writable values.
 */
enum SwStatus sw_heat_kernel_diag(const struct SwGraph *g,
                                  size_t v,
                                  size_t t_max,
                                  uint8_t lazy,
                                  uint8_t allow_approximate,
                                  double *buf,
                                  size_t len);

/**
 * First-return probabilities `f(t)`, `t = 0..=t_max`, of the lazy walk
 * from `v`, after checking the renewal and taboo routes agree.
 *
 * # Safety
 * `g` must be a live handle and `buf` must hold `len` writable values.
 */
enum SwStatus sw_first_return(const struct SwGraph *g,
                              size_t v,
                              size_t t_max,
                              double *buf,
                              size_t len);

/**
 * Escape probability of the lazy walk from `v` from `t_max` exact steps.
 *
 * # Safety
 * `g` must be a live handle; `out` writable.
 */
enum SwStatus sw_escape_prob(const struct SwGraph *g,
                             size_t v,
                             size_t t_max,
                             size_t d_eff,
                             struct SwEscape *out);

/**
 * `p(x,x;t) / p(y,y;t)` on a glued graph for `t = 0..=t_max`.
 *
 * # Safety
 * `g` must be a live handle and `buf` must hold `len` writable values.
 */
enum SwStatus sw_ratio(const struct SwGraph *g,
                       size_t t_max,
                       uint8_t allow_approximate,
                       double *buf,
                       size_t len);

/**
 * The smallest admissible next period after `a_prev` for constant `gamma`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SwStatus sw_next_scale(uint64_t gamma, uint64_t a_prev, uint64_t *out);

/**
 * Centered residue of `n` modulo `l >= 1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SwStatus sw_centered_mod(int64_t n, int64_t l, int64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SLABWALK_H */
