#include "dsf/scfilter.hpp"

namespace dsf {

namespace {

void require_meas_shape(const DelayedMeasurement& meas, Index n) {
  if (meas.h_prior.cols() != n || meas.h_current.cols() != n ||
      meas.h_prior.rows() != meas.h_current.rows()) {
    throw DimensionError("sc_update: measurement blocks " + meas.h_prior.shape_str() + " / " +
                         meas.h_current.shape_str() + " do not fit state dimension " +
                         std::to_string(n));
  }
}

}  // namespace

Belief AugmentedBelief::current() const {
  const Index n = state_dim();
  return Belief{block(mean_aug, n, 0, n, 1), block(cov_aug, n, n, n, n)};
}

AugmentedBelief sc_clone(const Belief& belief) {
  const Index n = belief.dim();
  AugmentedBelief aug;
  aug.mean_aug = vstack(belief.mean, belief.mean);
  aug.cov_aug = Matrix(2 * n, 2 * n);
  for (Index bi = 0; bi < 2; ++bi)
    for (Index bj = 0; bj < 2; ++bj) set_block(aug.cov_aug, bi * n, bj * n, belief.cov);
  return aug;
}

AugmentedBelief sc_predict(const AugmentedBelief& aug, const SystemModel& model,
                           const Matrix& u) {
  const Index n = aug.state_dim();
  if (model.state_dim() != n) {
    throw DimensionError("sc_predict: model dimension " + std::to_string(model.state_dim()) +
                         " does not match augmented state dimension " + std::to_string(n));
  }
  const Matrix& phi = model.phi;
  const Matrix phi_t = transpose(phi);
  const Matrix s = process_noise_cov(model.g, model.q_cov);

  AugmentedBelief out;
  out.mean_aug = aug.mean_aug;
  const Matrix x_cur = block(aug.mean_aug, n, 0, n, 1);
  set_block(out.mean_aug, n, 0, add(matmul(phi, x_cur), matmul(model.b, u)));

  // [[P_jj,       P_jk*phi^T       ]
  //  [phi*P_kj,   phi*P_kk*phi^T+S ]]
  out.cov_aug = aug.cov_aug;
  const Matrix top_right = block(aug.cov_aug, 0, n, n, n);
  const Matrix bottom_left = block(aug.cov_aug, n, 0, n, n);
  const Matrix bottom_right = block(aug.cov_aug, n, n, n, n);
  set_block(out.cov_aug, 0, n, matmul(top_right, phi_t));
  set_block(out.cov_aug, n, 0, matmul(phi, bottom_left));
  set_block(out.cov_aug, n, n, symmetrize(add(matmul(matmul(phi, bottom_right), phi_t), s)));
  return out;
}

ScUpdateResult sc_update(const AugmentedBelief& aug, const DelayedMeasurement& meas,
                         OpCounter* counter) {
  require_meas_shape(meas, aug.state_dim());
  const Matrix h_aug = hstack(meas.h_prior, meas.h_current);
  const Belief joint{aug.mean_aug, aug.cov_aug};
  const Belief updated = kf_update(joint, h_aug, meas.r_cov, meas.y, counter);

  ScUpdateResult result;
  result.augmented = AugmentedBelief{updated.mean, updated.cov};
  result.current = result.augmented.current();
  return result;
}

Belief sc_update_reduced(const AugmentedBelief& aug, const DelayedMeasurement& meas,
                         OpCounter* counter) {
  const Index n = aug.state_dim();
  require_meas_shape(meas, n);
  if (!is_psd(aug.cov_aug, kCovarianceTol)) {
    throw NumericError("sc_update_reduced: augmented covariance is not PSD within tolerance");
  }
  const Matrix h_aug = hstack(meas.h_prior, meas.h_current);

  const Matrix innovation =
      sub(meas.y, matmul(h_aug, aug.mean_aug, counter), counter);
  const Matrix p_ht = matmul(aug.cov_aug, transpose(h_aug), counter);  // 2n x m
  const Matrix upsilon = symmetrize(add(matmul(h_aug, p_ht, counter), meas.r_cov, counter));

  // Bottom n rows of the augmented gain only.
  const Matrix p_ht_bottom = block(p_ht, n, 0, n, p_ht.cols());
  Matrix gain;
  try {
    gain = transpose(gauss_solve(transpose(upsilon), transpose(p_ht_bottom), counter));
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(
        std::string("sc_update_reduced: innovation covariance is singular (") + e.what() + ")");
  }

  Belief out;
  const Matrix x_cur = block(aug.mean_aug, n, 0, n, 1);
  out.mean = add(x_cur, matmul(gain, innovation, counter), counter);

  // Bottom-right block of the Joseph form: with T_b = [-K*Hj, I - K*Hk] (the
  // bottom rows of I - K_aug*H_aug), P+ = T_b*P_aug*T_b^T + K*R*K^T.
  Matrix t_bottom = hstack(matmul(gain, meas.h_prior, counter),
                           matmul(gain, meas.h_current, counter));
  for (std::size_t i = 0; i < t_bottom.data().size(); ++i) t_bottom.data()[i] = -t_bottom.data()[i];
  for (Index i = 0; i < n; ++i) t_bottom(i, n + i) += 1.0;
  if (counter) counter->additions += static_cast<std::uint64_t>(n);

  const Matrix t1 = matmul(matmul(t_bottom, aug.cov_aug, counter), transpose(t_bottom), counter);
  const Matrix t2 = matmul(matmul(gain, meas.r_cov, counter), transpose(gain), counter);
  out.cov = symmetrize(add(t1, t2, counter));
  return out;
}

}  // namespace dsf
