#pragma once

// Test-only numerical oracles and generators. Deliberately independent of the
// library's computational paths: the multiply oracle is a plain triple loop
// and eigenvalues come from a cyclic Jacobi iteration, so they can referee
// the production code.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dsf/matrix.hpp"
#include "dsf/random.hpp"

namespace dsf::test {

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (Index k = 0; k < a.cols(); ++k) sum = (k == 0) ? a(i, 0) * b(0, j) : sum + a(i, k) * b(k, j);
      c(i, j) = sum;
    }
  }
  return c;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
  const Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-26) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::fabs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eigs(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) eigs[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

inline double min_eigenvalue(const Matrix& sym) { return jacobi_eigenvalues(sym).front(); }

inline bool psd_within(const Matrix& sym, double tol) {
  const double scale = std::max(1.0, max_abs(sym));
  return min_eigenvalue(symmetrize(sym)) >= -tol * scale;
}

// 2-norm condition number via the singular values of A (eigenvalues of A^T A).
inline double condition_2norm(const Matrix& a) {
  const auto eigs = jacobi_eigenvalues(symmetrize(naive_matmul(transpose(a), a)));
  const double lo = eigs.front(), hi = eigs.back();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(hi / lo);
}

inline Matrix random_entries(RandomStream& rng, Index rows, Index cols, double lo = -1.0,
                             double hi = 1.0) {
  Matrix a(rows, cols);
  for (double& v : a.data()) v = rng.next_in(lo, hi);
  return a;
}

inline Matrix random_spd(RandomStream& rng, Index n, double diag_boost = 0.5) {
  const Matrix a = random_entries(rng, n, n);
  Matrix s = naive_matmul(a, transpose(a));
  for (Index i = 0; i < n; ++i) s(i, i) += diag_boost * n;
  return symmetrize(s);
}

inline Matrix random_invertible(RandomStream& rng, Index n, double max_condition = 1e3) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix phi = Matrix::identity(n);
    const double spread = 0.6 / std::sqrt(static_cast<double>(n));
    for (double& v : phi.data()) v += spread * rng.next_in(-1.0, 1.0);
    if (condition_2norm(phi) < max_condition) return phi;
  }
  return Matrix::identity(n);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return max_abs(sub(a, b)); }

inline double rel_close(const Matrix& a, const Matrix& b) {
  return frobenius_norm(sub(a, b)) / (1.0 + std::max(frobenius_norm(a), frobenius_norm(b)));
}

}  // namespace dsf::test
