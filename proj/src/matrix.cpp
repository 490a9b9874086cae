#include "dsf/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace dsf {

namespace {

void require(bool cond, const std::string& message) {
  if (!cond) throw DimensionError(message);
}

void ensure_finite(const Matrix& m, const char* op) {
  for (double v : m.data()) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string(op) + ": produced a non-finite entry");
    }
  }
}

}  // namespace

Matrix::Matrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) {
    throw DimensionError("Matrix: dimensions must be positive, got " + std::to_string(rows) +
                         "x" + std::to_string(cols));
  }
  data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<Index>(rows.size());
  require(rows_ > 0, "Matrix: empty row list");
  cols_ = static_cast<Index>(rows.begin()->size());
  require(cols_ > 0, "Matrix: empty first row");
  data_.reserve(static_cast<std::size_t>(rows_) * cols_);
  for (const auto& row : rows) {
    require(static_cast<Index>(row.size()) == cols_, "Matrix: ragged row lengths");
    for (double v : row) data_.push_back(v);
  }
  ensure_finite(*this, "Matrix literal");
}

Matrix Matrix::identity(Index n) {
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::zeros(Index rows, Index cols) { return Matrix(rows, cols); }

std::string Matrix::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix vec(std::initializer_list<double> entries) {
  Matrix v(static_cast<Index>(entries.size()), 1);
  Index i = 0;
  for (double x : entries) v(i++, 0) = x;
  ensure_finite(v, "vec");
  return v;
}

Matrix vec(const std::vector<double>& entries) {
  Matrix v(static_cast<Index>(entries.size()), 1);
  for (Index i = 0; i < v.rows(); ++i) v(i, 0) = entries[static_cast<std::size_t>(i)];
  ensure_finite(v, "vec");
  return v;
}

Matrix matmul(const Matrix& a, const Matrix& b, OpCounter* counter) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions disagree, " + a.shape_str() + " * " +
                         b.shape_str());
  }
  const Index p = a.rows(), q = a.cols(), r = b.cols();
  Matrix c(p, r);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < r; ++j) {
      double sum = a(i, 0) * b(0, j);
      for (Index k = 1; k < q; ++k) sum += a(i, k) * b(k, j);
      c(i, j) = sum;
    }
  }
  if (counter) {
    counter->multiplications += static_cast<std::uint64_t>(p) * q * r;
    counter->additions += static_cast<std::uint64_t>(p) * r * (q - 1);
  }
  ensure_finite(c, "matmul");
  return c;
}

double SolveStats::pivot_ratio() const {
  if (min_abs_pivot <= 0.0) return std::numeric_limits<double>::infinity();
  return max_abs_pivot / min_abs_pivot;
}

Matrix gauss_solve(const Matrix& a, const Matrix& b, OpCounter* counter, SolveStats* stats) {
  if (a.rows() != a.cols()) {
    throw DimensionError("gauss_solve: A must be square, got " + a.shape_str());
  }
  if (b.rows() != a.rows()) {
    throw DimensionError("gauss_solve: row counts disagree, A " + a.shape_str() + " vs B " +
                         b.shape_str());
  }
  const Index m = a.rows(), p = b.cols();
  const double pivot_floor = 1e-12 * norm_inf(a);

  Matrix u = a;
  Matrix x = b;
  std::uint64_t mults = 0, adds = 0;
  double max_piv = 0.0, min_piv = std::numeric_limits<double>::infinity();

  for (Index k = 0; k < m; ++k) {
    Index pivot_row = k;
    double pivot_mag = std::fabs(u(k, k));
    for (Index i = k + 1; i < m; ++i) {
      const double mag = std::fabs(u(i, k));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = i;
      }
    }
    if (pivot_mag <= pivot_floor) {
      throw SingularMatrixError("gauss_solve: singular matrix (pivot " +
                                std::to_string(pivot_mag) + " at column " + std::to_string(k) +
                                ", threshold " + std::to_string(pivot_floor) + ")");
    }
    if (pivot_row != k) {
      for (Index j = k; j < m; ++j) std::swap(u(k, j), u(pivot_row, j));
      for (Index j = 0; j < p; ++j) std::swap(x(k, j), x(pivot_row, j));
    }
    max_piv = std::max(max_piv, pivot_mag);
    min_piv = std::min(min_piv, pivot_mag);

    for (Index i = k + 1; i < m; ++i) {
      const double factor = u(i, k) / u(k, k);
      ++mults;  // the division
      u(i, k) = 0.0;
      for (Index j = k + 1; j < m; ++j) {
        u(i, j) -= factor * u(k, j);
        ++mults;
        ++adds;
      }
      for (Index j = 0; j < p; ++j) {
        x(i, j) -= factor * x(k, j);
        ++mults;
        ++adds;
      }
    }
  }

  // Back substitution, one column of B at a time.
  for (Index j = 0; j < p; ++j) {
    for (Index i = m - 1; i >= 0; --i) {
      double sum = x(i, j);
      for (Index k = i + 1; k < m; ++k) {
        sum -= u(i, k) * x(k, j);
        ++mults;
        ++adds;
      }
      x(i, j) = sum / u(i, i);
      ++mults;  // the division
    }
  }

  if (counter) {
    counter->multiplications += mults;
    counter->additions += adds;
  }
  if (stats) {
    stats->max_abs_pivot = max_piv;
    stats->min_abs_pivot = min_piv;
  }
  ensure_finite(x, "gauss_solve");
  return x;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix add(const Matrix& a, const Matrix& b, OpCounter* counter) {
  if (!a.same_shape(b)) {
    throw DimensionError("add: shapes disagree, " + a.shape_str() + " vs " + b.shape_str());
  }
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] = a.data()[i] + b.data()[i];
  if (counter) counter->additions += static_cast<std::uint64_t>(a.rows()) * a.cols();
  ensure_finite(c, "add");
  return c;
}

Matrix sub(const Matrix& a, const Matrix& b, OpCounter* counter) {
  if (!a.same_shape(b)) {
    throw DimensionError("sub: shapes disagree, " + a.shape_str() + " vs " + b.shape_str());
  }
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] = a.data()[i] - b.data()[i];
  if (counter) counter->additions += static_cast<std::uint64_t>(a.rows()) * a.cols();
  ensure_finite(c, "sub");
  return c;
}

Matrix symmetrize(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("symmetrize: requires a square matrix, got " + a.shape_str());
  }
  Matrix s(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  ensure_finite(s, "symmetrize");
  return s;
}

bool is_spd(const Matrix& a, double tol) {
  if (a.empty() || a.rows() != a.cols()) return false;
  const Index n = a.rows();
  double dev = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) dev = std::max(dev, 0.5 * std::fabs(a(i, j) - a(j, i)));
  if (dev > tol) return false;

  const Matrix s = symmetrize(a);
  const double shift = tol * trace(s) / n;

  // Cholesky of S + shift*I; all pivots must stay strictly positive.
  Matrix l(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = s(j, j) + shift;
    for (Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return false;
    l(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
      if (!std::isfinite(l(i, j))) return false;
    }
  }
  return true;
}

bool is_psd(const Matrix& a, double tol) {
  if (a.empty() || a.rows() != a.cols()) return false;
  const Index n = a.rows();
  double dev = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) dev = std::max(dev, 0.5 * std::fabs(a(i, j) - a(j, i)));
  if (dev > tol * (1.0 + max_abs(a))) return false;

  const Matrix s = symmetrize(a);
  const double scale = 1.0 + std::max(trace(s), 0.0) / n;
  const double slack = tol * scale;

  // Unit-lower LDL^T; pivots may touch zero (within slack) but not go below.
  Matrix l = Matrix::identity(n);
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  for (Index j = 0; j < n; ++j) {
    double dj = s(j, j);
    for (Index k = 0; k < j; ++k) dj -= l(j, k) * l(j, k) * d[static_cast<std::size_t>(k)];
    if (!(dj >= -slack)) return false;
    d[static_cast<std::size_t>(j)] = dj;
    for (Index i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (Index k = 0; k < j; ++k)
        v -= l(i, k) * l(j, k) * d[static_cast<std::size_t>(k)];
      if (dj > slack) {
        l(i, j) = v / dj;
        if (!std::isfinite(l(i, j))) return false;
      } else {
        // Effectively-zero pivot: PSD requires the rest of the column to be
        // (near) zero as well, otherwise there is a negative eigenvalue.
        const double bound = std::sqrt(std::max(dj, 0.0) * (s(i, i) + slack)) + slack;
        if (std::fabs(v) > bound) return false;
        l(i, j) = 0.0;
      }
    }
  }
  return true;
}

Matrix block(const Matrix& a, Index row0, Index col0, Index nrows, Index ncols) {
  if (row0 < 0 || col0 < 0 || row0 + nrows > a.rows() || col0 + ncols > a.cols()) {
    throw DimensionError("block: [" + std::to_string(row0) + "," + std::to_string(col0) + "]+" +
                         std::to_string(nrows) + "x" + std::to_string(ncols) +
                         " out of bounds for " + a.shape_str());
  }
  Matrix b(nrows, ncols);
  for (Index i = 0; i < nrows; ++i)
    for (Index j = 0; j < ncols; ++j) b(i, j) = a(row0 + i, col0 + j);
  return b;
}

void set_block(Matrix& a, Index row0, Index col0, const Matrix& b) {
  if (row0 < 0 || col0 < 0 || row0 + b.rows() > a.rows() || col0 + b.cols() > a.cols()) {
    throw DimensionError("set_block: " + b.shape_str() + " at [" + std::to_string(row0) + "," +
                         std::to_string(col0) + "] out of bounds for " + a.shape_str());
  }
  for (Index i = 0; i < b.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j) a(row0 + i, col0 + j) = b(i, j);
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("hstack: row counts disagree, " + a.shape_str() + " vs " +
                         b.shape_str());
  }
  Matrix c(a.rows(), a.cols() + b.cols());
  set_block(c, 0, 0, a);
  set_block(c, 0, a.cols(), b);
  return c;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("vstack: column counts disagree, " + a.shape_str() + " vs " +
                         b.shape_str());
  }
  Matrix c(a.rows() + b.rows(), a.cols());
  set_block(c, 0, 0, a);
  set_block(c, a.rows(), 0, b);
  return c;
}

double trace(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("trace: requires a square matrix, got " + a.shape_str());
  }
  double t = 0.0;
  for (Index i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

double norm_inf(const Matrix& a) {
  double best = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    double row = 0.0;
    for (Index j = 0; j < a.cols(); ++j) row += std::fabs(a(i, j));
    best = std::max(best, row);
  }
  return best;
}

double max_abs(const Matrix& a) {
  double best = 0.0;
  for (double v : a.data()) best = std::max(best, std::fabs(v));
  return best;
}

double frobenius_norm(const Matrix& a) {
  double sum = 0.0;
  for (double v : a.data()) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace dsf
