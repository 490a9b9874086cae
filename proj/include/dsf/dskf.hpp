#pragma once

#include "dsf/models.hpp"

namespace dsf {

// Derived measurement terms for the delayed-state update, built from the
// accumulated transition (phi, S) over the gap and the measurement blocks:
//   J = h_prior * phi_inv
//   H = h_prior * phi_inv + h_current
//   N = h_prior * phi_inv * S
//   R = J*S*J^T + r_cov
// With h_prior = 0 these collapse to (0, h_current, 0, r_cov) and the update
// below reduces to the standard Kalman update.
struct DskfTerms {
  Matrix j_mat;   // m x n
  Matrix h_eff;   // m x n
  Matrix n_mat;   // m x n
  Matrix r_eff;   // m x m
  double phi_condition = 1.0;  // pivot-ratio estimate for the transition solve
};

// Thrown when the accumulated transition fails the invertibility guard.
class TransitionError : public SingularMatrixError {
 public:
  using SingularMatrixError::SingularMatrixError;
};

// Pivot-ratio threshold above which the transition is rejected outright, and
// the band above which terms carry an ill-conditioning warning.
inline constexpr double kTransitionConditionLimit = 1e12;
inline constexpr double kTransitionConditionWarn = 1e8;

DskfTerms dskf_terms(const EpochTransition& trans, const DelayedMeasurement& meas,
                     OpCounter* counter = nullptr);

// Per-update diagnostics surfaced to run metadata.
struct DskfUpdateInfo {
  double phi_condition = 1.0;
  bool ill_conditioned = false;  // condition estimate above the warning band
};

// Innovation of the delayed-state measurement against the predicted state:
// dy = y - H*x_pred + J*drift_accum.
Matrix dskf_innovation(const Belief& belief_pred, const EpochTransition& trans,
                       const DelayedMeasurement& meas, const DskfTerms& terms,
                       OpCounter* counter = nullptr);

// Generalized gain K = (P*H^T - N^T) * (H*P*H^T - N*H^T - H*N^T + R)^{-1}.
Matrix dskf_gain(const Belief& belief_pred, const DskfTerms& terms,
                 OpCounter* counter = nullptr);

// Full delayed-state update. On success the epoch transition is reset for the
// next gap. The posterior covariance is
//   (I-KH)P(I-KH)^T + (I-KH)N^T K^T + K N (I-KH)^T + K R K^T, symmetrized,
// and must come out PSD within tolerance or a NumericError is thrown.
Belief dskf_update(const Belief& belief_pred, EpochTransition& trans,
                   const DelayedMeasurement& meas, OpCounter* counter = nullptr,
                   DskfUpdateInfo* info = nullptr);

// Reconstructs the anchor-epoch covariance from the predicted one:
// P_j = phi_inv * (P_pred - S) * phi_inv^T. Test support for the equivalence
// argument; not used by the filter itself.
Matrix back_propagated_cov(const Belief& belief_pred, const EpochTransition& trans);

}  // namespace dsf
