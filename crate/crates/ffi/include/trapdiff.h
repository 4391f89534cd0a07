#ifndef TRAPDIFF_H
#define TRAPDIFF_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TRAPDIFF_FAMILY_PARETO 0

#define TRAPDIFF_FAMILY_LOG_LOGISTIC 1

#define TRAPDIFF_FAMILY_FRECHET 2

typedef enum TrapdiffStatus {
  TRAPDIFF_STATUS_OK = 0,
  TRAPDIFF_STATUS_NULL_POINTER = 1,
  TRAPDIFF_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Input outside the domain of the function.
   */
  TRAPDIFF_STATUS_DOMAIN = 3,
  /**
   * Quadrature, eigen-solve or inversion failure.
   */
  TRAPDIFF_STATUS_NUMERIC = 4,
  /**
   * The user callback returned nonzero.
   */
  TRAPDIFF_STATUS_CALLBACK = 5,
  TRAPDIFF_STATUS_PANIC = 6,
} TrapdiffStatus;

/**
 * Opaque discrete-ordinates solver with its spectrum cache.
 */
typedef struct TrapdiffRteSolver TrapdiffRteSolver;

/**
 * Double-exponential Bromwich inversion settings.
 */
typedef struct TrapdiffInversion {
  double sigma;
  double m;
  uint32_t j;
  double k;
} TrapdiffInversion;

/**
 * Transform callback: writes `F(s)` to `out_re`/`out_im` and returns 0, or
 * returns nonzero to abort the inversion.
 */
typedef int32_t (*TrapdiffTransform)(double s_re,
                                     double s_im,
                                     void *user_data,
                                     double *out_re,
                                     double *out_im);

/**
 * Cross sections in 1/cm, speed in cm/min, waiting-time scale in min.
 */
typedef struct TrapdiffParams {
  double sigma_a;
  double sigma_s;
  double sigma_trap;
  double speed;
  /**
   * One of the `TRAPDIFF_FAMILY_*` constants.
   */
  uint32_t family;
  double alpha;
  double gamma;
} TrapdiffParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *trapdiff_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *trapdiff_version(void);

struct TrapdiffInversion trapdiff_inversion_default(void);

/**
 * Gauss–Legendre rule of order `n` on (0, 1); `nodes` and `weights` must
 * hold `n` values each.
 *
 * # Safety
 * The output arrays must be valid for `n` writes.
 */
enum TrapdiffStatus trapdiff_gauss_legendre(size_t n, double *nodes, double *weights);

/**
 * Mainardi function `M_α(z)`, `z ≥ 0`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum TrapdiffStatus trapdiff_mainardi(double alpha, double z, double *out);

/**
 * One-sided α-stable density with Laplace transform `exp(-s^α)`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum TrapdiffStatus trapdiff_stable_density(double alpha, double t, double *out);

/**
 * Inverts a user transform at `t`. `cfg` may be null for the defaults.
 *
 * # Safety
 * `out` must be valid for one write; `f` must be safe to call with
 * `user_data`.
 */
enum TrapdiffStatus trapdiff_invert(TrapdiffTransform f,
                                    void *user_data,
                                    double t,
                                    const struct TrapdiffInversion *cfg,
                                    double *out);

/**
 * Creates a solver with `ordinates` positive directions. Free it with
 * [`trapdiff_rte_free`].
 *
 * # Safety
 * `params` must point to a valid struct and `out` be valid for one write.
 */
enum TrapdiffStatus trapdiff_rte_new(const struct TrapdiffParams *params,
                                     size_t ordinates,
                                     struct TrapdiffRteSolver **out);

/**
 * # Safety
 * `solver` must come from [`trapdiff_rte_new`] and not be used afterwards.
 * Null is ignored.
 */
void trapdiff_rte_free(struct TrapdiffRteSolver *solver);

/**
 * Laplace-domain density `ū(x, s)`.
 *
 * # Safety
 * `solver` must be a live handle; the outputs must be valid for one write.
 */
enum TrapdiffStatus trapdiff_rte_laplace_density(const struct TrapdiffRteSolver *solver,
                                                 double s_re,
                                                 double s_im,
                                                 double x,
                                                 double *out_re,
                                                 double *out_im);

/**
 * Density `u(x_i, t)` at `n` points. Spectra are computed once per node and
 * shared across the points. `cfg` may be null for the defaults.
 *
 * # Safety
 * `solver` must be a live handle; `xs` and `out` must be valid for `n`
 * reads and writes.
 */
enum TrapdiffStatus trapdiff_rte_profile(const struct TrapdiffRteSolver *solver,
                                         const double *xs,
                                         size_t n,
                                         double t,
                                         const struct TrapdiffInversion *cfg,
                                         double *out);

/**
 * Time-fractional diffusion density with the same parameters; `tol` is the
 * quadrature target (e.g. 1e-8).
 *
 * # Safety
 * `params` must point to a valid struct and `out` be valid for one write.
 */
enum TrapdiffStatus trapdiff_u_de(const struct TrapdiffParams *params,
                                  double x,
                                  double t,
                                  double tol,
                                  double *out);

/**
 * Normal-diffusion limit of the same parameters.
 *
 * # Safety
 * `params` must point to a valid struct and `out` be valid for one write.
 */
enum TrapdiffStatus trapdiff_normal_diffusion(const struct TrapdiffParams *params,
                                              double x,
                                              double t,
                                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRAPDIFF_H */
