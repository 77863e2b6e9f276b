#ifndef SPINCORR_H
#define SPINCORR_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum SpincorrStatus {
  SPINCORR_STATUS_OK = 0,
  SPINCORR_STATUS_NULL_POINTER = 1,
  SPINCORR_STATUS_INVALID_ARGUMENT = 2,
  SPINCORR_STATUS_NOT_UNIT_VECTOR = 3,
  SPINCORR_STATUS_NON_FINITE = 4,
  SPINCORR_STATUS_INVALID_STATE = 5,
  SPINCORR_STATUS_ZERO_SAMPLES = 6,
  SPINCORR_STATUS_NO_ANALYTIC_AVERAGE = 7,
  SPINCORR_STATUS_CONSISTENCY = 8,
  SPINCORR_STATUS_PANIC = 9,
} SpincorrStatus;

typedef enum SpincorrDistributionKind {
  SPINCORR_DISTRIBUTION_KIND_SPHERE = 0,
  SPINCORR_DISTRIBUTION_KIND_PLANE = 1,
  SPINCORR_DISTRIBUTION_KIND_FIXED = 2,
} SpincorrDistributionKind;

typedef enum SpincorrModelKind {
  SPINCORR_MODEL_KIND_ENTANGLED = 0,
  SPINCORR_MODEL_KIND_MISMATCHED = 1,
  SPINCORR_MODEL_KIND_DISENTANGLED = 2,
} SpincorrModelKind;

/**
 * Opaque two-spin density matrix.
 */
typedef struct SpincorrDensity SpincorrDensity;

/**
 * Axis distribution; `axis` is the plane normal or the fixed axis and is
 * ignored for the sphere.
 */
typedef struct SpincorrDistribution {
  enum SpincorrDistributionKind kind;
  double axis[3];
} SpincorrDistribution;

/**
 * Row-major `t[3*i + j]` plus single-spin vectors.
 */
typedef struct SpincorrTensor {
  double t[9];
  double s1[3];
  double s2[3];
} SpincorrTensor;

typedef struct SpincorrDecomposition {
  double total;
  double classical;
  double quantum;
} SpincorrDecomposition;

/**
 * Tetrad `a, a', b, b'` and its CHSH value. `violating` is 1 when
 * `|s_value|` exceeds the classical bound.
 */
typedef struct SpincorrChsh {
  double a[3];
  double a_prime[3];
  double b[3];
  double b_prime[3];
  double s_value;
  int32_t violating;
} SpincorrChsh;

/**
 * Source of simulated events. `theta`, `phi` and `delta` apply to the
 * mismatched source, `distribution` to the disentangled one.
 */
typedef struct SpincorrModel {
  enum SpincorrModelKind kind;
  double theta;
  double phi;
  double delta;
  struct SpincorrDistribution distribution;
} SpincorrModel;

typedef struct SpincorrEstimate {
  double e_hat;
  double std_error;
  double mean_r;
  double mean_s;
  uint64_t n;
  uint64_t seed;
} SpincorrEstimate;

typedef struct SpincorrEnsemble {
  double correlation[9];
  double std_error[9];
  double mean_axis[3];
  uint64_t n;
  uint64_t seed;
} SpincorrEnsemble;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *spincorr_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on this thread.
 */
const char *spincorr_last_error_message(void);

enum SpincorrStatus spincorr_density_singlet(struct SpincorrDensity **out);

/**
 * `(|+⟩₁|−⟩₂ − |−⟩₁|+⟩₂)/√2` with spin 1 quantized along `(theta1, phi1)`
 * and spin 2 along `(theta2, phi2)`.
 */
enum SpincorrStatus spincorr_density_pair(double theta1,
                                          double phi1,
                                          double theta2,
                                          double phi2,
                                          struct SpincorrDensity **out);

/**
 * Singlet about `(theta, phi)` with relative phase `delta` between the spins.
 */
enum SpincorrStatus spincorr_density_mismatched(double theta,
                                                double phi,
                                                double delta,
                                                struct SpincorrDensity **out);

/**
 * Validated density matrix from row-major real and imaginary parts (16 each).
 */
enum SpincorrStatus spincorr_density_from_entries(const double *re,
                                                  const double *im,
                                                  struct SpincorrDensity **out);

/**
 * Removes coherences in the product basis quantized along `(theta, phi)`.
 */
enum SpincorrStatus spincorr_density_dephase(const struct SpincorrDensity *rho,
                                             double theta,
                                             double phi,
                                             struct SpincorrDensity **out);

/**
 * Monte Carlo mixture of dephased singlets over `n` sampled axes.
 */
enum SpincorrStatus spincorr_density_averaged(const struct SpincorrDistribution *dist,
                                              uint64_t n,
                                              uint64_t seed,
                                              struct SpincorrDensity **out);

/**
 * Releases a handle. Null is ignored.
 */
void spincorr_density_free(struct SpincorrDensity *rho);

/**
 * Copies the matrix into row-major `re[16]` and `im[16]`.
 */
enum SpincorrStatus spincorr_density_entries(const struct SpincorrDensity *rho,
                                             double *re,
                                             double *im);

enum SpincorrStatus spincorr_density_tensor(const struct SpincorrDensity *rho,
                                            struct SpincorrTensor *out);

/**
 * `E(a, b) = a·t·b − (a·s1)(s2·b)`.
 */
enum SpincorrStatus spincorr_correlate(const struct SpincorrTensor *tensor,
                                       const double *a,
                                       const double *b,
                                       double *out);

/**
 * Classical and quantum parts of `E(a, b)` for the pair quantized along
 * `(theta, phi)` with phase mismatch `delta`.
 */
enum SpincorrStatus spincorr_decompose(const double *a,
                                       const double *b,
                                       double theta,
                                       double phi,
                                       double delta,
                                       struct SpincorrDecomposition *out);

/**
 * CHSH value of `tensor` at `settings` = `a, a', b, b'` (12 doubles).
 */
enum SpincorrStatus spincorr_chsh(const struct SpincorrTensor *tensor,
                                  const double *settings,
                                  struct SpincorrChsh *out);

/**
 * Tetrad maximizing `|S|` for `tensor`.
 */
enum SpincorrStatus spincorr_maximize_chsh(const struct SpincorrTensor *tensor,
                                           struct SpincorrChsh *out);

/**
 * Count-based estimate `mean(rs) − mean(r)·mean(s)` over `n` simulated events.
 */
enum SpincorrStatus spincorr_estimate_correlation(const struct SpincorrModel *model,
                                                  const double *a,
                                                  const double *b,
                                                  uint64_t n,
                                                  uint64_t seed,
                                                  struct SpincorrEstimate *out);

/**
 * Monte Carlo average of `−P̂P̂` over `n` axes drawn from `dist`.
 */
enum SpincorrStatus spincorr_ensemble_average(const struct SpincorrDistribution *dist,
                                              uint64_t n,
                                              uint64_t seed,
                                              struct SpincorrEnsemble *out);

/**
 * Exact `−⟨P̂P̂⟩` for the sphere and plane distributions.
 */
enum SpincorrStatus spincorr_ensemble_analytic(const struct SpincorrDistribution *dist,
                                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPINCORR_H */
