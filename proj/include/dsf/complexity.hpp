#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsf/matrix.hpp"
#include "dsf/random.hpp"

namespace dsf {

// Exact rational arithmetic for the cost polynomials. Every coefficient in
// the published tables is a multiple of 1/6, so int64 numerators evaluated up
// to n = m = 100 stay far from overflow.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n);  // NOLINT(google-explicit-constructor): integers are exact rationals
  Rational(long long n, long long d);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator<(const Rational& o) const;
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// One monomial c * n^np * m^mp and an ordered polynomial, stored in the same
// term order the source tables print them in.
struct CostTerm {
  Rational coeff;
  int n_pow = 0;
  int m_pow = 0;
};

struct CostPolynomial {
  std::vector<CostTerm> terms;

  Rational evaluate(long long n, long long m) const;
  // Renders like "0.33m^3 + 4mn^2 + 4m^2n + m^2 - 0.33m": coefficients are
  // rounded to two decimals with trailing zeros stripped, unit coefficients
  // are omitted, and the m factor prints before the n factor.
  std::string to_string() const;
  // Term-order-independent equality of the underlying polynomial.
  bool same_polynomial(const CostPolynomial& other) const;
  CostPolynomial operator+(const CostPolynomial& other) const;
};

enum class Method { SC, DSKF };
enum class Metric { Flops, Memory };

// Per-update arithmetic cost, split by filter step.
struct CostBreakdown {
  Rational gain_mults, gain_adds;
  Rational state_mults, state_adds;
  Rational cov_mults, cov_adds;
  Rational total_flops;
};

// Per-update float storage, split by filter step.
struct MemoryModel {
  Rational gain_floats, state_floats, cov_floats;
  Rational total_floats;
};

enum class FlopRow { GainMults, GainAdds, StateMults, StateAdds, CovMults, CovAdds, Total };
enum class MemRow { Gain, State, Cov, Total };

const CostPolynomial& flops_polynomial(Method method, FlopRow row);
const CostPolynomial& memory_polynomial(Method method, MemRow row);

CostBreakdown flops_model(Method method, long long n, long long m);
MemoryModel memory_model(Method method, long long n, long long m);

// Percent reduction of DSKF relative to SC: entry for (n, m) sits at
// (n-1, m-1) and equals 100*(SC - DSKF)/SC for the chosen metric.
Matrix reduction_grid(Metric metric, Index n_max, Index m_max);

// Measured per-update operation counts from the instrumented filters on one
// random problem shape; counts depend on (n, m) only, so every trial must
// reproduce them exactly (checked).
struct MeasuredComparison {
  Index n = 0, m = 0;
  int trials = 0;
  OpCounter sc_full;     // full augmented Joseph update
  OpCounter sc_reduced;  // bottom-row gain variant
  OpCounter dskf;        // delayed-state update including the transition solve
  bool dskf_fewer_mults = false;   // sign of (sc_full - dskf) multiplications
  bool dskf_fewer_flops = false;   // sign of (sc_full - dskf) total
};

MeasuredComparison measured_comparison(Index n, Index m, int trials, RandomStream& rng);

}  // namespace dsf
