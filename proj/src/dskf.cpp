#include "dsf/dskf.hpp"

namespace dsf {

namespace {

Matrix invert_transition(const Matrix& phi, double* condition, OpCounter* counter) {
  SolveStats stats;
  Matrix phi_inv;
  try {
    phi_inv = gauss_solve(phi, Matrix::identity(phi.rows()), counter, &stats);
  } catch (const SingularMatrixError& e) {
    throw TransitionError(std::string("dskf: accumulated transition is not invertible (") +
                          e.what() + ")");
  }
  const double ratio = stats.pivot_ratio();
  if (ratio > kTransitionConditionLimit) {
    throw TransitionError("dskf: accumulated transition too ill-conditioned (pivot ratio " +
                          std::to_string(ratio) + ")");
  }
  if (condition) *condition = ratio;
  return phi_inv;
}

}  // namespace

DskfTerms dskf_terms(const EpochTransition& trans, const DelayedMeasurement& meas,
                     OpCounter* counter) {
  if (meas.state_dim() != trans.dim()) {
    throw DimensionError("dskf_terms: measurement state dimension " +
                         std::to_string(meas.state_dim()) + " does not match transition " +
                         std::to_string(trans.dim()));
  }
  DskfTerms terms;
  const Matrix phi_inv = invert_transition(trans.phi_accum, &terms.phi_condition, counter);
  terms.j_mat = matmul(meas.h_prior, phi_inv, counter);
  terms.h_eff = add(terms.j_mat, meas.h_current, counter);
  terms.n_mat = matmul(terms.j_mat, trans.s_accum, counter);
  terms.r_eff =
      symmetrize(add(matmul(terms.n_mat, transpose(terms.j_mat), counter), meas.r_cov, counter));
  return terms;
}

Matrix dskf_innovation(const Belief& belief_pred, const EpochTransition& trans,
                       const DelayedMeasurement& meas, const DskfTerms& terms,
                       OpCounter* counter) {
  const Matrix predicted = matmul(terms.h_eff, belief_pred.mean, counter);
  const Matrix drift_term = matmul(terms.j_mat, trans.drift_accum, counter);
  return add(sub(meas.y, predicted, counter), drift_term, counter);
}

Matrix dskf_gain(const Belief& belief_pred, const DskfTerms& terms, OpCounter* counter) {
  const Matrix p_ht = matmul(belief_pred.cov, transpose(terms.h_eff), counter);  // n x m
  const Matrix n_ht = matmul(terms.n_mat, transpose(terms.h_eff), counter);      // m x m

  // Ups = H*P*H^T - N*H^T - H*N^T + R, with H*N^T reused as (N*H^T)^T.
  Matrix upsilon = add(matmul(terms.h_eff, p_ht, counter), terms.r_eff, counter);
  upsilon = sub(upsilon, n_ht, counter);
  upsilon = symmetrize(sub(upsilon, transpose(n_ht), counter));

  const Matrix numerator = sub(p_ht, transpose(terms.n_mat), counter);  // n x m
  try {
    return transpose(gauss_solve(transpose(upsilon), transpose(numerator), counter));
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string("dskf_gain: innovation covariance is singular (") +
                              e.what() + ")");
  }
}

Belief dskf_update(const Belief& belief_pred, EpochTransition& trans,
                   const DelayedMeasurement& meas, OpCounter* counter, DskfUpdateInfo* info) {
  if (!is_psd(belief_pred.cov, kCovarianceTol)) {
    throw NumericError("dskf_update: predicted covariance is not PSD within tolerance");
  }
  const Index n = belief_pred.dim();

  const DskfTerms terms = dskf_terms(trans, meas, counter);
  if (info) {
    info->phi_condition = terms.phi_condition;
    info->ill_conditioned = terms.phi_condition > kTransitionConditionWarn;
  }
  const Matrix innovation = dskf_innovation(belief_pred, trans, meas, terms, counter);
  const Matrix gain = dskf_gain(belief_pred, terms, counter);

  Belief out;
  out.mean = add(belief_pred.mean, matmul(gain, innovation, counter), counter);

  const Matrix i_kh = sub(Matrix::identity(n), matmul(gain, terms.h_eff, counter), counter);
  const Matrix joseph =
      matmul(matmul(i_kh, belief_pred.cov, counter), transpose(i_kh), counter);
  // Correlation cross terms: (I-KH)*N^T*K^T and its transpose.
  const Matrix kn = matmul(gain, terms.n_mat, counter);  // n x n
  const Matrix cross = matmul(i_kh, transpose(kn), counter);
  const Matrix krk =
      matmul(matmul(gain, terms.r_eff, counter), transpose(gain), counter);

  Matrix cov = add(joseph, cross, counter);
  cov = add(cov, transpose(cross), counter);
  out.cov = symmetrize(add(cov, krk, counter));

  if (!is_psd(out.cov, kCovarianceTol)) {
    throw NumericError("dskf_update: posterior covariance lost PSD beyond tolerance");
  }
  trans = EpochTransition::initial(n);
  return out;
}

Matrix back_propagated_cov(const Belief& belief_pred, const EpochTransition& trans) {
  const Matrix diff = sub(belief_pred.cov, trans.s_accum);
  Matrix phi_inv_diff;
  try {
    // phi_inv * (P - S) * phi_inv^T via two solves against phi_accum.
    phi_inv_diff = gauss_solve(trans.phi_accum, diff);
    const Matrix full = gauss_solve(trans.phi_accum, transpose(phi_inv_diff));
    return symmetrize(transpose(full));
  } catch (const SingularMatrixError& e) {
    throw TransitionError(std::string("back_propagated_cov: transition not invertible (") +
                          e.what() + ")");
  }
}

}  // namespace dsf
