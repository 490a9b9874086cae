#pragma once

#include "dsf/matrix.hpp"
#include "dsf/random.hpp"

namespace dsf {

// Tolerance used when validating covariance-like inputs throughout the filters.
inline constexpr double kCovarianceTol = 1e-9;

// One discrete dynamics step: x_k = phi*x_j + b*u + g*w, w ~ N(0, q_cov).
struct SystemModel {
  Matrix phi;    // n x n state transition
  Matrix b;      // n x p control-input model
  Matrix g;      // n x q noise coupling
  Matrix q_cov;  // q x q process-noise covariance

  Index state_dim() const { return phi.rows(); }
  Index control_dim() const { return b.cols(); }
  Index noise_dim() const { return g.cols(); }
};

// State estimate and covariance at one epoch.
struct Belief {
  Matrix mean;  // n x 1
  Matrix cov;   // n x n

  Index dim() const { return mean.rows(); }
};

// Dynamics accumulated between two measurement-anchor epochs j and k:
// phi_accum plays the single-step transition, drift_accum the total
// deterministic control effect mapped to k, and s_accum the accumulated
// process-noise covariance over (j, k].
struct EpochTransition {
  Matrix phi_accum;    // n x n
  Matrix drift_accum;  // n x 1
  Matrix s_accum;      // n x n

  static EpochTransition initial(Index n);
  Index dim() const { return phi_accum.rows(); }
};

// Measurement y = h_prior*x_j + h_current*x_k + v, v ~ N(0, r_cov), tying the
// state at the anchor epoch j to the state at the measurement epoch k.
// A conventional (non-delayed) measurement has h_prior = 0.
struct DelayedMeasurement {
  Matrix h_prior;    // m x n
  Matrix h_current;  // m x n
  Matrix r_cov;      // m x m
  Matrix y;          // m x 1

  Index meas_dim() const { return h_prior.rows(); }
  Index state_dim() const { return h_prior.cols(); }
};

// S = G*Q*G^T, symmetrized.
Matrix process_noise_cov(const Matrix& g, const Matrix& q_cov, OpCounter* counter = nullptr);

// Composes one more step onto an epoch transition:
//   phi_accum <- phi*phi_accum
//   drift_accum <- phi*drift_accum + b*u
//   s_accum <- phi*s_accum*phi^T + G*Q*G^T (symmetrized)
EpochTransition accumulate(const EpochTransition& trans, const SystemModel& model,
                           const Matrix& u);

// Relative-position (odometry) measurement: -I on the position slice of the
// prior state, +I on the same slice of the current state.
DelayedMeasurement odometry_measurement(const Matrix& observed_delta, const Matrix& r_cov,
                                        Index state_dim, Index slice_begin);

// Propagates a true state one step, drawing process noise from the stream.
// A zero q_cov is treated as the noiseless model.
Matrix simulate_step(const Matrix& truth, const SystemModel& model, const Matrix& u,
                     RandomStream& rng);

bool is_zero(const Matrix& a);

}  // namespace dsf
