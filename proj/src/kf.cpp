#include "dsf/kf.hpp"

namespace dsf {

namespace {

void require_valid_cov(const Matrix& cov, const char* who) {
  if (!is_psd(cov, kCovarianceTol)) {
    throw NumericError(std::string(who) + ": input covariance is not PSD within tolerance");
  }
}

}  // namespace

Belief kf_predict(const Belief& belief, const SystemModel& model, const Matrix& u) {
  require_valid_cov(belief.cov, "kf_predict");
  Belief out;
  out.mean = add(matmul(model.phi, belief.mean), matmul(model.b, u));
  const Matrix propagated = matmul(matmul(model.phi, belief.cov), transpose(model.phi));
  out.cov = symmetrize(add(propagated, process_noise_cov(model.g, model.q_cov)));
  return out;
}

Belief kf_update(const Belief& belief, const Matrix& h, const Matrix& r, const Matrix& y,
                 OpCounter* counter) {
  require_valid_cov(belief.cov, "kf_update");
  const Index n = belief.dim();

  const Matrix innovation = sub(y, matmul(h, belief.mean, counter), counter);
  const Matrix p_ht = matmul(belief.cov, transpose(h), counter);
  const Matrix upsilon = symmetrize(add(matmul(h, p_ht, counter), r, counter));

  // K = P*H^T * Upsilon^{-1}, via the transposed system.
  Matrix gain;
  try {
    gain = transpose(gauss_solve(transpose(upsilon), transpose(p_ht), counter));
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string("kf_update: innovation covariance is singular (") +
                              e.what() + ")");
  }

  Belief out;
  out.mean = add(belief.mean, matmul(gain, innovation, counter), counter);

  // Joseph form: P+ = (I - K*H)*P*(I - K*H)^T + K*R*K^T.
  const Matrix i_kh = sub(Matrix::identity(n), matmul(gain, h, counter), counter);
  const Matrix t1 = matmul(matmul(i_kh, belief.cov, counter), transpose(i_kh), counter);
  const Matrix t2 = matmul(matmul(gain, r, counter), transpose(gain), counter);
  out.cov = symmetrize(add(t1, t2, counter));
  return out;
}

}  // namespace dsf
