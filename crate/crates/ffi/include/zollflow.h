#ifndef ZOLLFLOW_H
#define ZOLLFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZfStatus {
  ZF_STATUS_OK = 0,
  ZF_STATUS_NULL_POINTER = 1,
  ZF_STATUS_INVALID_ARGUMENT = 2,
  ZF_STATUS_NUMERICAL = 3,
  ZF_STATUS_PANIC = 4,
} ZfStatus;

typedef enum ZfSurface {
  ZF_SURFACE_ROUND = 0,
  ZF_SURFACE_GONG_RAW = 1,
  ZF_SURFACE_GONG_NORMALIZED = 2,
} ZfSurface;

/**
 * Conformal flow state.
 */
typedef struct ZfFlow ZfFlow;

/**
 * Arc-length profile `ds^2 + rho(s)^2 dphi^2`.
 */
typedef struct ZfProfile ZfProfile;

typedef struct ZfSweepSummary {
  double min;
  double max;
  double spread;
  double mean;
  size_t n_entries;
  size_t n_flagged;
} ZfSweepSummary;

typedef struct ZfDiagnostics {
  double t;
  double area;
  double k_bar;
  double min_k;
  double max_k;
  double equator_length;
} ZfDiagnostics;

typedef struct ZfWeinstein {
  double i_value;
  int64_t nearest;
  double residual;
} ZfWeinstein;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len - 1` bytes) and returns the full length in
 * bytes excluding the terminator. `buf` may be null to query the length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t zf_last_error_message(char *buf, size_t len);

/**
 * NUL-terminated library version.
 */
const char *zf_version(void);

/**
 * Catalog surface at its own scale.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum ZfStatus zf_profile_new(enum ZfSurface kind, struct ZfProfile **out);

/**
 * Catalog surface rescaled to area `4 pi`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum ZfStatus zf_profile_new_unit_area(enum ZfSurface kind, struct ZfProfile **out);

/**
 * Michel surface for the odd function `h(x) = sum coeffs[k] x^(2k+1)`.
 *
 * # Safety
 * `coeffs` must be valid for `n_coeffs` reads; `out` for a pointer write.
 */
enum ZfStatus zf_profile_new_michel(const double *coeffs,
                                    size_t n_coeffs,
                                    size_t n_nodes,
                                    struct ZfProfile **out);

/**
 * # Safety
 * `p` must be null or a handle from this library not yet freed.
 */
void zf_profile_free(struct ZfProfile *p);

/**
 * Total meridian length `S`.
 *
 * # Safety
 * `p` must be a live handle; `out` valid for a write.
 */
enum ZfStatus zf_profile_length(const struct ZfProfile *p, double *out);

/**
 * # Safety
 * `p` must be a live handle; `out` valid for a write.
 */
enum ZfStatus zf_profile_area(const struct ZfProfile *p, double *out);

/**
 * # Safety
 * `p` must be a live handle; `out` valid for a write.
 */
enum ZfStatus zf_profile_average_curvature(const struct ZfProfile *p, double *out);

/**
 * `rho(s)` for `s` in `[0, S]`.
 *
 * # Safety
 * `p` must be a live handle; `out` valid for a write.
 */
enum ZfStatus zf_profile_rho(const struct ZfProfile *p, double s, double *out);

/**
 * Gaussian curvature `-rho''/rho` at arc length `s` in `(0, S)`.
 *
 * # Safety
 * `p` must be a live handle; `out` valid for a write.
 */
enum ZfStatus zf_profile_curvature(const struct ZfProfile *p, double s, double *out);

/**
 * Length of the equator of a reflection-symmetric profile.
 *
 * # Safety
 * `p` must be a live handle; `out` valid for a write.
 */
enum ZfStatus zf_equator_length(const struct ZfProfile *p, double *out);

/**
 * Period sweep over `n_samples` Clairaut constants plus the widest
 * parallel. Non-positive tolerances or horizon select the defaults.
 *
 * # Safety
 * `p` must be a live handle; `out` valid for a write.
 */
enum ZfStatus zf_zoll_sweep(const struct ZfProfile *p,
                            size_t n_samples,
                            double tol,
                            double closure_tol,
                            double horizon,
                            struct ZfSweepSummary *out);

/**
 * Closed-form first variation of the widest parallel's length.
 *
 * # Safety
 * `p` must be a live handle; `out` valid for a write.
 */
enum ZfStatus zf_lprime_analytic(const struct ZfProfile *p, double *out);

/**
 * Flow state on `n_nodes` conformal nodes from an area-`4 pi` symmetric
 * profile.
 *
 * # Safety
 * `p` must be a live handle; `out` valid for a pointer write.
 */
enum ZfStatus zf_flow_create(const struct ZfProfile *p, size_t n_nodes, struct ZfFlow **out);

/**
 * # Safety
 * `f` must be null or a handle from this library not yet freed.
 */
void zf_flow_free(struct ZfFlow *f);

/**
 * Advances the state in place to time `t`. `max_dt <= 0` uses the stability
 * bound alone. On failure the state is left unchanged.
 *
 * # Safety
 * `f` must be a live handle.
 */
enum ZfStatus zf_flow_evolve(struct ZfFlow *f, double t, double max_dt);

/**
 * # Safety
 * `f` must be a live handle; `out` valid for a write.
 */
enum ZfStatus zf_flow_diagnostics(const struct ZfFlow *f, struct ZfDiagnostics *out);

/**
 * Richardson-extrapolated `l'(t)` from forward offsets `dts`. The estimate
 * is written even when the residual check fails, in which case the status
 * is `Numerical`.
 *
 * # Safety
 * `f` must be a live handle; `dts` valid for `n` reads; `value` and
 * `residual` valid for writes.
 */
enum ZfStatus zf_flow_lprime_numeric(const struct ZfFlow *f,
                                     const double *dts,
                                     size_t n,
                                     double *value,
                                     double *residual);

/**
 * Arc-length profile of the current flow state.
 *
 * # Safety
 * `f` must be a live handle; `out` valid for a pointer write.
 */
enum ZfStatus zf_flow_profile(const struct ZfFlow *f, struct ZfProfile **out);

/**
 * `i = volume / (l^n vol(S^n))`; only `n = 2` is supported.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum ZfStatus zf_weinstein_integer(double volume, double l, int n, struct ZfWeinstein *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZOLLFLOW_H */
