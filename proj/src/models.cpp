#include "dsf/models.hpp"

namespace dsf {

EpochTransition EpochTransition::initial(Index n) {
  return EpochTransition{Matrix::identity(n), Matrix::zeros(n, 1), Matrix::zeros(n, n)};
}

Matrix process_noise_cov(const Matrix& g, const Matrix& q_cov, OpCounter* counter) {
  return symmetrize(matmul(matmul(g, q_cov, counter), transpose(g), counter));
}

EpochTransition accumulate(const EpochTransition& trans, const SystemModel& model,
                           const Matrix& u) {
  const Matrix& phi = model.phi;
  EpochTransition next;
  next.phi_accum = matmul(phi, trans.phi_accum);
  next.drift_accum = add(matmul(phi, trans.drift_accum), matmul(model.b, u));
  const Matrix propagated = matmul(matmul(phi, trans.s_accum), transpose(phi));
  next.s_accum = symmetrize(add(propagated, process_noise_cov(model.g, model.q_cov)));
  return next;
}

DelayedMeasurement odometry_measurement(const Matrix& observed_delta, const Matrix& r_cov,
                                        Index state_dim, Index slice_begin) {
  const Index d = observed_delta.rows();
  if (observed_delta.cols() != 1) {
    throw DimensionError("odometry_measurement: observed delta must be a column vector, got " +
                         observed_delta.shape_str());
  }
  if (r_cov.rows() != d || r_cov.cols() != d) {
    throw DimensionError("odometry_measurement: noise covariance " + r_cov.shape_str() +
                         " does not match measurement dimension " + std::to_string(d));
  }
  if (slice_begin < 0 || slice_begin + d > state_dim) {
    throw DimensionError("odometry_measurement: position slice [" + std::to_string(slice_begin) +
                         ", " + std::to_string(slice_begin + d) + ") out of bounds for state of" +
                         " dimension " + std::to_string(state_dim));
  }
  DelayedMeasurement meas;
  meas.h_prior = Matrix::zeros(d, state_dim);
  meas.h_current = Matrix::zeros(d, state_dim);
  for (Index i = 0; i < d; ++i) {
    meas.h_prior(i, slice_begin + i) = -1.0;
    meas.h_current(i, slice_begin + i) = 1.0;
  }
  meas.r_cov = r_cov;
  meas.y = observed_delta;
  return meas;
}

Matrix simulate_step(const Matrix& truth, const SystemModel& model, const Matrix& u,
                     RandomStream& rng) {
  Matrix next = add(matmul(model.phi, truth), matmul(model.b, u));
  if (!is_zero(model.q_cov)) {
    const Matrix w = gaussian_vector(rng, model.q_cov);
    next = add(next, matmul(model.g, w));
  }
  return next;
}

bool is_zero(const Matrix& a) {
  for (double v : a.data())
    if (v != 0.0) return false;
  return true;
}

}  // namespace dsf
