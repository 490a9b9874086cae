#include "dsf/random.hpp"

#include <cmath>

namespace dsf {

double RandomStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.283185307179586476925286766559 * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

RandomStream RandomStream::split(std::uint64_t purpose) const {
  // Hash (state, purpose) through two splitmix steps; children with distinct
  // purposes land in unrelated regions of the sequence space.
  RandomStream mixer(state_ ^ (purpose * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull));
  const std::uint64_t derived = mixer.next_u64();
  return RandomStream(derived);
}

Matrix cholesky(const Matrix& cov) {
  if (cov.rows() != cov.cols()) {
    throw DimensionError("cholesky: requires a square matrix, got " + cov.shape_str());
  }
  const Index n = cov.rows();
  Matrix l(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = cov(j, j);
    for (Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) {
      throw NumericError("cholesky: factorization failure, matrix is not SPD (pivot " +
                         std::to_string(d) + " at " + std::to_string(j) + ")");
    }
    l(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      double v = cov(i, j);
      for (Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

Matrix gaussian_vector(RandomStream& rng, const Matrix& cov) {
  const Matrix l = cholesky(cov);
  Matrix z(cov.rows(), 1);
  for (Index i = 0; i < z.rows(); ++i) z(i, 0) = rng.next_normal();
  return matmul(l, z);
}

}  // namespace dsf
