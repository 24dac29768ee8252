#ifndef PSALAB_H
#define PSALAB_H

/* Generated by cbindgen from psalab-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum PsalabStatus {
  PSALAB_STATUS_OK = 0,
  // A required pointer argument was null.
  PSALAB_STATUS_NULL_POINTER = 1,
  // Arguments violated a precondition (mode out of range, bad
  // reflectivity, non-normalized overlaps, ...).
  PSALAB_STATUS_INVALID_ARGUMENT = 2,
} PsalabStatus;

// Opaque multimode Gaussian state (covariance-matrix representation).
typedef struct PsalabState PsalabState;

// Physicality diagnostic of a state handle.
typedef struct PsalabPhysicality {
  double symmetry_defect;
  double min_uncertainty_eigenvalue;
  // 1 when the state satisfies the uncertainty bound, 0 otherwise.
  int32_t passed;
} PsalabPhysicality;

// Raw and normalized variances of one measurement scheme.
typedef struct PsalabReport {
  double var_x_minus;
  double var_y_plus;
  double snl;
  double nor_x;
  double nor_y;
  double inseparability;
} PsalabReport;

// Mean intensity, shot-noise limit and their ratio for the power-detector
// scheme.
typedef struct PsalabPowerRatio {
  double mean;
  double snl;
  double ratio;
} PsalabPowerRatio;

// Multimode inseparability estimate with its validity flags.
typedef struct PsalabMultimodeEstimate {
  double value;
  // Zero-based index of the dominant mode pair.
  uintptr_t leading_mode;
  // 1 when the fundamental PSA gain is below the trusted regime.
  int32_t low_gain;
  // 1 when the local oscillators cannot see the fundamental mode.
  int32_t fundamental_dark;
} PsalabMultimodeEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates the vacuum of `n_modes` modes. Returns null when `n_modes` is 0.
// The handle must be released with `psalab_state_free`.
struct PsalabState *psalab_state_vacuum(uintptr_t n_modes);

// Deep-copies a state handle; returns null when `state` is null.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
struct PsalabState *psalab_state_clone(const struct PsalabState *state);

// Releases a handle created by this library. Null is accepted.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
void psalab_state_free(struct PsalabState *state);

// Number of modes of the state.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_state_n_modes(const struct PsalabState *state, uintptr_t *out);

// Two-mode parametric amplifier of conversion strength `strength` and pump
// phase `phase` (0 amplifies, pi de-amplifies) on modes `mode_a`, `mode_b`.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_apply_two_mode_pa(struct PsalabState *state,
                                           uintptr_t mode_a,
                                           uintptr_t mode_b,
                                           double strength,
                                           double phase);

// Degenerate phase-sensitive amplifier on one mode.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_apply_degenerate_psa(struct PsalabState *state,
                                              uintptr_t mode,
                                              double strength,
                                              double phase);

// Non-degenerate phase-sensitive amplifier coupling two modes.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_apply_nondegenerate_psa(struct PsalabState *state,
                                                 uintptr_t mode_a,
                                                 uintptr_t mode_b,
                                                 double strength,
                                                 double phase);

// Beamsplitter loss of reflectivity `reflectivity` in [0, 1] on one mode.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_apply_loss(struct PsalabState *state, uintptr_t mode, double reflectivity);

// Phase shift `a -> a e^{i angle}` on one mode.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_apply_phase(struct PsalabState *state, uintptr_t mode, double angle);

// Variance of the quadrature X(angle) of one mode (vacuum = 1).
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_quad_variance(const struct PsalabState *state,
                                       uintptr_t mode,
                                       double angle,
                                       double *out);

// Variance of `sum_i weights[i] * X_{modes[i]}(angles[i])` over `len` terms.
//
// # Safety
//
// Array pointers must reference at least the stated number of readable
// elements; output pointers must be valid for writes.
enum PsalabStatus psalab_linear_combo_variance(const struct PsalabState *state,
                                               const uintptr_t *modes,
                                               const double *angles,
                                               const double *weights,
                                               uintptr_t len,
                                               double *out);

// Mean photon number of one mode.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_mean_photon_number(const struct PsalabState *state,
                                            uintptr_t mode,
                                            double *out);

// Symmetry and uncertainty-bound diagnostic of a state.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_check_physicality(const struct PsalabState *state,
                                           struct PsalabPhysicality *out);

// Noise reduction and inseparability straight out of a source of strength
// `nu`.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_source_metrics(double nu, struct PsalabReport *out);

// Traditional dual-homodyne measurement with equal per-arm detection loss.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_traditional_metrics(double nu,
                                             double detection_loss,
                                             struct PsalabReport *out);

// PSA-assisted joint measurement (de-amplifying PSA of strength `g`,
// electrical gain `lambda`, equal per-arm loss).
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_psa_joint_metrics(double nu,
                                           double g,
                                           double lambda,
                                           double detection_loss,
                                           struct PsalabReport *out);

// Single BHD at one output (`port` is 1 or 2) of a de-amplifying PSA.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_psa_single_bhd_metrics(double nu,
                                                double g,
                                                uint32_t port,
                                                double detection_loss,
                                                struct PsalabReport *out);

// Power detector behind a de-amplifying PSA: mean intensity, SNL and ratio.
//
// # Safety
//
// `state` must be null or a live handle from this library; output
// pointers must be valid for writes.
enum PsalabStatus psalab_psa_power_detector_metrics(double nu,
                                                    double g,
                                                    double detection_loss,
                                                    struct PsalabPowerRatio *out);

// Multimode inseparability of the traditional scheme. The source is given
// by per-mode conversion strengths `nu_j` (descending), the local
// oscillators by complex overlap coefficients split into re/im arrays.
//
// # Safety
//
// Array pointers must reference at least the stated number of readable
// elements; output pointers must be valid for writes.
enum PsalabStatus psalab_multimode_traditional(const double *strengths,
                                               uintptr_t n_gains,
                                               const double *xi_re,
                                               const double *xi_im,
                                               uintptr_t n_xi,
                                               const double *zeta_re,
                                               const double *zeta_im,
                                               uintptr_t n_zeta,
                                               double phi0,
                                               double psi0,
                                               double *out);

// Multimode inseparability of the PSA-assisted schemes. The PSA is a
// Schmidt-mode ladder (`weights`, descending, unit square norm) driven at
// `pump`. `port` 0 selects the joint measurement; 1 or 2 the single BHD at
// that output.
//
// # Safety
//
// Array pointers must reference at least the stated number of readable
// elements; output pointers must be valid for writes.
enum PsalabStatus psalab_multimode_psa(const double *strengths,
                                       uintptr_t n_gains,
                                       const double *weights,
                                       uintptr_t n_weights,
                                       double pump,
                                       const double *xi_re,
                                       const double *xi_im,
                                       uintptr_t n_xi,
                                       const double *zeta_re,
                                       const double *zeta_im,
                                       uintptr_t n_zeta,
                                       double phi0,
                                       double psi0,
                                       uint32_t port,
                                       struct PsalabMultimodeEstimate *out);

// Static description of a status code.
const char *psalab_status_message(enum PsalabStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSALAB_H */
