#include "dsf/oracle.hpp"

#include <string>

namespace dsf {

void TrajectoryProblem::validate() const {
  const Index total = epoch_count();
  Index last_meas_epoch = 0;
  for (const auto& sched : measurements) {
    if (sched.anchor_epoch >= sched.meas_epoch) {
      throw DimensionError("TrajectoryProblem: anchor epoch " +
                           std::to_string(sched.anchor_epoch) + " must precede measurement epoch " +
                           std::to_string(sched.meas_epoch));
    }
    if (sched.anchor_epoch < last_meas_epoch || sched.meas_epoch > total) {
      throw DimensionError("TrajectoryProblem: schedule entry (" +
                           std::to_string(sched.anchor_epoch) + ", " +
                           std::to_string(sched.meas_epoch) + ") out of order or out of bounds");
    }
    last_meas_epoch = sched.meas_epoch;
  }
}

Belief joint_condition(const Belief& prior_j, const EpochTransition& trans,
                       const DelayedMeasurement& meas) {
  const Index n = prior_j.dim();
  const Matrix& phi = trans.phi_accum;
  const Matrix phi_t = transpose(phi);

  // Joint Gaussian of (x_j, x_k):
  //   mean [x_j; phi*x_j + drift]
  //   cov  [[P,     P*phi^T         ]
  //         [phi*P, phi*P*phi^T + S ]]
  const Matrix mean_k = add(matmul(phi, prior_j.mean), trans.drift_accum);
  const Matrix p_phit = matmul(prior_j.cov, phi_t);
  const Matrix cov_kk = add(matmul(phi, p_phit), trans.s_accum);

  Matrix joint_mean = vstack(prior_j.mean, mean_k);
  Matrix joint_cov(2 * n, 2 * n);
  set_block(joint_cov, 0, 0, prior_j.cov);
  set_block(joint_cov, 0, n, p_phit);
  set_block(joint_cov, n, 0, transpose(p_phit));
  set_block(joint_cov, n, n, cov_kk);
  joint_cov = symmetrize(joint_cov);

  // Condition on y = [h_prior h_current]*(x_j, x_k) + v and marginalize x_k.
  const Matrix c = hstack(meas.h_prior, meas.h_current);
  const Matrix c_t = transpose(c);
  const Matrix sigma_ct = matmul(joint_cov, c_t);                       // 2n x m
  const Matrix meas_cov = symmetrize(add(matmul(c, sigma_ct), meas.r_cov));
  const Matrix predicted_y = matmul(c, joint_mean);
  const Matrix residual = sub(meas.y, predicted_y);

  Matrix w_res, w_cross;
  try {
    w_res = gauss_solve(meas_cov, residual);                 // Sigma_y^{-1} * (y - y_hat)
    w_cross = gauss_solve(meas_cov, transpose(sigma_ct));    // Sigma_y^{-1} * C*Sigma
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(
        std::string("joint_condition: measurement-prediction covariance is singular (") +
        e.what() + ")");
  }

  const Matrix cond_mean = add(joint_mean, matmul(sigma_ct, w_res));
  const Matrix cond_cov = sub(joint_cov, matmul(sigma_ct, w_cross));

  Belief out;
  out.mean = block(cond_mean, n, 0, n, 1);
  out.cov = symmetrize(block(cond_cov, n, n, n, n));
  return out;
}

namespace {

void add_block(Matrix& lambda, Index bi, Index bj, Index n, const Matrix& contribution) {
  for (Index i = 0; i < contribution.rows(); ++i)
    for (Index j = 0; j < contribution.cols(); ++j)
      lambda(bi * n + i, bj * n + j) += contribution(i, j);
}

Matrix spd_inverse(const Matrix& a, const char* what) {
  if (!is_spd(a, 1e-10)) {
    throw NumericError(std::string("batch_solve: ") + what + " is not SPD");
  }
  return gauss_solve(a, Matrix::identity(a.rows()));
}

}  // namespace

Belief batch_solve(const TrajectoryProblem& problem) {
  problem.validate();
  const Index n = problem.initial_belief.dim();
  const Index epochs = problem.epoch_count() + 1;
  const Index total = n * epochs;

  Matrix lambda(total, total);
  Matrix eta(total, 1);

  // Prior factor on x_0.
  const Matrix p0_inv = spd_inverse(problem.initial_belief.cov, "initial covariance");
  add_block(lambda, 0, 0, n, p0_inv);
  {
    const Matrix contrib = matmul(p0_inv, problem.initial_belief.mean);
    for (Index i = 0; i < n; ++i) eta(i, 0) += contrib(i, 0);
  }

  // Dynamics factors: x_{t+1} - phi*x_t - b*u ~ N(0, S).
  for (Index t = 0; t < problem.epoch_count(); ++t) {
    const SystemModel& model = problem.steps[static_cast<std::size_t>(t)].first;
    const Matrix& u = problem.steps[static_cast<std::size_t>(t)].second;
    const Matrix s = process_noise_cov(model.g, model.q_cov);
    const Matrix w = spd_inverse(s, "process noise covariance");
    const Matrix& phi = model.phi;
    const Matrix phi_t = transpose(phi);
    const Matrix w_phi = matmul(w, phi);
    const Matrix bu = matmul(model.b, u);

    add_block(lambda, t, t, n, matmul(phi_t, w_phi));
    const Matrix off = matmul(phi_t, w);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        lambda(t * n + i, (t + 1) * n + j) -= off(i, j);
        lambda((t + 1) * n + i, t * n + j) -= off(j, i);
      }
    add_block(lambda, t + 1, t + 1, n, w);

    const Matrix w_bu = matmul(w, bu);
    const Matrix phit_w_bu = matmul(phi_t, w_bu);
    for (Index i = 0; i < n; ++i) {
      eta(t * n + i, 0) -= phit_w_bu(i, 0);
      eta((t + 1) * n + i, 0) += w_bu(i, 0);
    }
  }

  // Measurement factors across epoch pairs (j, k).
  for (const auto& sched : problem.measurements) {
    const DelayedMeasurement& meas = sched.meas;
    const Matrix w = spd_inverse(meas.r_cov, "measurement covariance");
    const Index j = sched.anchor_epoch, k = sched.meas_epoch;
    const Matrix hj_t = transpose(meas.h_prior);
    const Matrix hk_t = transpose(meas.h_current);
    const Matrix w_hj = matmul(w, meas.h_prior);
    const Matrix w_hk = matmul(w, meas.h_current);

    add_block(lambda, j, j, n, matmul(hj_t, w_hj));
    add_block(lambda, j, k, n, matmul(hj_t, w_hk));
    add_block(lambda, k, j, n, matmul(hk_t, w_hj));
    add_block(lambda, k, k, n, matmul(hk_t, w_hk));

    const Matrix w_y = matmul(w, meas.y);
    const Matrix cj = matmul(hj_t, w_y);
    const Matrix ck = matmul(hk_t, w_y);
    for (Index i = 0; i < n; ++i) {
      eta(j * n + i, 0) += cj(i, 0);
      eta(k * n + i, 0) += ck(i, 0);
    }
  }

  lambda = symmetrize(lambda);

  // Solve for the MAP trajectory and the final-epoch covariance block.
  Matrix selector(total, n);
  for (Index i = 0; i < n; ++i) selector(total - n + i, i) = 1.0;
  Matrix map_mean, cov_cols;
  try {
    map_mean = gauss_solve(lambda, eta);
    cov_cols = gauss_solve(lambda, selector);
  } catch (const SingularMatrixError& e) {
    throw UnobservableProblemError(
        std::string("batch_solve: information matrix is singular (") + e.what() + ")");
  }

  Belief out;
  out.mean = block(map_mean, total - n, 0, n, 1);
  out.cov = symmetrize(block(cov_cols, total - n, 0, n, n));
  return out;
}

}  // namespace dsf
