#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsf {

using Index = int;

// Thrown when operand shapes do not conform; the message names both shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when Gaussian elimination meets a pivot below the singularity threshold.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown on non-finite results or violated numerical invariants (lost PSD-ness, etc.).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Multiplication/addition tallies for one counting scope (one filter instance,
// one benchmark cell). Counts only grow until reset().
struct OpCounter {
  std::uint64_t multiplications = 0;
  std::uint64_t additions = 0;

  void reset() {
    multiplications = 0;
    additions = 0;
  }
  std::uint64_t total() const { return multiplications + additions; }
};

// Dense row-major matrix of doubles. Values are immutable by convention once
// they leave a constructing operation; all arithmetic lives in free functions
// so that op counting stays explicit at call sites.
class Matrix {
 public:
  Matrix() = default;  // 0x0 placeholder, rejected by all arithmetic
  Matrix(Index rows, Index cols);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(Index n);
  static Matrix zeros(Index rows, Index cols);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_str() const;

  double& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(Index i, Index j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

// Column-vector literal, e.g. vec({1.0, 2.0, 3.0}) is 3x1.
Matrix vec(std::initializer_list<double> entries);
Matrix vec(const std::vector<double>& entries);

// C = A*B. Counts p*q*r multiplications and p*r*(q-1) additions: an inner
// product of length q costs q multiplications and q-1 additions.
Matrix matmul(const Matrix& a, const Matrix& b, OpCounter* counter = nullptr);

// Pivot magnitudes seen during one gauss_solve; max/min ratio is the crude
// condition heuristic used by the filters' invertibility guards.
struct SolveStats {
  double max_abs_pivot = 0.0;
  double min_abs_pivot = 0.0;
  double pivot_ratio() const;
};

// Solves A*X = B by Gaussian elimination with partial (row) pivoting.
// Counts the multiplications/divisions and additions actually performed.
// Throws SingularMatrixError when a pivot falls to 1e-12 * ||A||_inf or below.
Matrix gauss_solve(const Matrix& a, const Matrix& b, OpCounter* counter = nullptr,
                   SolveStats* stats = nullptr);

Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b, OpCounter* counter = nullptr);  // p*q additions
Matrix sub(const Matrix& a, const Matrix& b, OpCounter* counter = nullptr);  // p*q additions
Matrix symmetrize(const Matrix& a);                                          // (A + A^T)/2

// True iff A is symmetric within tol and every pivot of a symmetric
// factorization exceeds -tol*trace(A)/n. Singular-but-PSD matrices with
// positive trace pass; the zero matrix and indefinite matrices do not.
bool is_spd(const Matrix& a, double tol);

// Positive-semidefinite test with absolute slack tol*(1 + trace/n); unlike
// is_spd it accepts the zero matrix. Used to guard covariance inputs/outputs.
bool is_psd(const Matrix& a, double tol);

// Block plumbing (not counted).
Matrix block(const Matrix& a, Index row0, Index col0, Index nrows, Index ncols);
void set_block(Matrix& a, Index row0, Index col0, const Matrix& b);
Matrix hstack(const Matrix& a, const Matrix& b);
Matrix vstack(const Matrix& a, const Matrix& b);

double trace(const Matrix& a);
double norm_inf(const Matrix& a);  // max absolute row sum
double max_abs(const Matrix& a);
double frobenius_norm(const Matrix& a);

}  // namespace dsf
