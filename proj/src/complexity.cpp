#include "dsf/complexity.hpp"

#include <map>
#include <numeric>
#include <stdexcept>

#include "dsf/dskf.hpp"
#include "dsf/equivalence.hpp"
#include "dsf/kf.hpp"
#include "dsf/scfilter.hpp"

namespace dsf {

Rational::Rational(long long n) : num(n), den(1) {}

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational Rational::operator+(const Rational& o) const {
  return Rational(num * o.den + o.num * den, den * o.den);
}
Rational Rational::operator-(const Rational& o) const {
  return Rational(num * o.den - o.num * den, den * o.den);
}
Rational Rational::operator*(const Rational& o) const {
  return Rational(num * o.num, den * o.den);
}
bool Rational::operator<(const Rational& o) const { return num * o.den < o.num * den; }

namespace {

long long ipow(long long base, int exp) {
  long long out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// Two-decimal rounding with trailing zeros stripped: 1/3 -> "0.33",
// 1/2 -> "0.5", 7/6 -> "1.17", integers print bare.
std::string coeff_to_string(const Rational& c) {
  long long num = c.num < 0 ? -c.num : c.num;
  const long long cents = (200 * num + c.den) / (2 * c.den);
  std::string out = std::to_string(cents / 100);
  const long long frac = cents % 100;
  if (frac != 0) {
    out += '.';
    out += static_cast<char>('0' + frac / 10);
    if (frac % 10 != 0) out += static_cast<char>('0' + frac % 10);
  }
  return out;
}

std::string term_vars(const CostTerm& t) {
  std::string out;
  if (t.m_pow > 0) {
    out += 'm';
    if (t.m_pow > 1) out += "^" + std::to_string(t.m_pow);
  }
  if (t.n_pow > 0) {
    out += 'n';
    if (t.n_pow > 1) out += "^" + std::to_string(t.n_pow);
  }
  return out;
}

}  // namespace

Rational CostPolynomial::evaluate(long long n, long long m) const {
  Rational sum;
  for (const CostTerm& t : terms) {
    sum = sum + t.coeff * Rational(ipow(n, t.n_pow) * ipow(m, t.m_pow));
  }
  return sum;
}

std::string CostPolynomial::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const CostTerm& t = terms[i];
    const bool negative = t.coeff.num < 0;
    if (i == 0) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    const std::string vars = term_vars(t);
    const bool unit = (t.coeff.num == 1 || t.coeff.num == -1) && t.coeff.den == 1;
    if (vars.empty() || !unit) out += coeff_to_string(t.coeff);
    out += vars;
  }
  return out;
}

bool CostPolynomial::same_polynomial(const CostPolynomial& other) const {
  auto collect = [](const CostPolynomial& p) {
    std::map<std::pair<int, int>, Rational> acc;
    for (const CostTerm& t : p.terms) {
      auto key = std::make_pair(t.n_pow, t.m_pow);
      auto it = acc.find(key);
      if (it == acc.end())
        acc.emplace(key, t.coeff);
      else
        it->second = it->second + t.coeff;
    }
    for (auto it = acc.begin(); it != acc.end();) {
      if (it->second.num == 0)
        it = acc.erase(it);
      else
        ++it;
    }
    return acc;
  };
  return collect(*this) == collect(other);
}

CostPolynomial CostPolynomial::operator+(const CostPolynomial& other) const {
  CostPolynomial out = *this;
  out.terms.insert(out.terms.end(), other.terms.begin(), other.terms.end());
  return out;
}

namespace {

constexpr int kFlopRows = 7;
constexpr int kMemRows = 4;

// Term lists transcribed row by row, in print order. Coefficients are the
// exact thirds/sixths the published two-decimal values round from.
const CostPolynomial kScFlops[kFlopRows] = {
    // Kalman gain, multiplications.
    {{{{1, 3}, 0, 3}, {{4}, 2, 1}, {{4}, 1, 2}, {{1}, 0, 2}, {{-1, 3}, 0, 1}}},
    // Kalman gain, additions.
    {{{{1, 3}, 0, 3},
      {{4}, 2, 1},
      {{4}, 1, 2},
      {{1, 2}, 0, 2},
      {{-4}, 1, 1},
      {{-5, 6}, 0, 1}}},
    // State update, multiplications / additions.
    {{{{4}, 1, 1}}},
    {{{{4}, 1, 1}}},
    // Covariance update, multiplications.
    {{{{16}, 3, 0}, {{8}, 2, 1}, {{2}, 1, 2}}},
    // Covariance update, additions.
    {{{{16}, 3, 0}, {{8}, 2, 1}, {{2}, 1, 2}, {{-12}, 2, 0}, {{-2}, 1, 1}, {{2}, 1, 0}}},
    // Total flops.
    {{{{32}, 3, 0},
      {{2, 3}, 0, 3},
      {{24}, 2, 1},
      {{12}, 1, 2},
      {{-12}, 2, 0},
      {{3, 2}, 0, 2},
      {{2}, 1, 1},
      {{2}, 1, 0},
      {{-7, 6}, 0, 1}}},
};

const CostPolynomial kDskfFlops[kFlopRows] = {
    // Kalman gain, multiplications.
    {{{{1, 3}, 3, 0},
      {{1, 3}, 0, 3},
      {{3}, 2, 1},
      {{4}, 1, 2},
      {{1}, 2, 0},
      {{1}, 0, 2},
      {{-1, 3}, 0, 1},
      {{-1, 3}, 1, 0}}},
    // Kalman gain, additions.
    {{{{1, 3}, 3, 0},
      {{1, 3}, 0, 3},
      {{3}, 2, 1},
      {{4}, 1, 2},
      {{1, 2}, 2, 0},
      {{3, 2}, 0, 2},
      {{-2}, 1, 1},
      {{-5, 6}, 0, 1},
      {{-5, 6}, 1, 0}}},
    // State update, multiplications / additions.
    {{{{2}, 1, 1}}},
    {{{{2}, 1, 1}}},
    // Covariance update, multiplications.
    {{{{3}, 3, 0}, {{3}, 2, 1}, {{1}, 1, 2}}},
    // Covariance update, additions.
    {{{{3}, 3, 0}, {{3}, 2, 1}, {{1}, 1, 2}, {{-3}, 2, 0}, {{-1}, 1, 1}, {{1}, 1, 0}}},
    // Total flops.
    {{{{20, 3}, 3, 0},
      {{2, 3}, 0, 3},
      {{12}, 2, 1},
      {{10}, 1, 2},
      {{-3, 2}, 2, 0},
      {{5, 2}, 0, 2},
      {{1}, 1, 1},
      {{-7, 6}, 0, 1},
      {{-1, 6}, 1, 0}}},
};

const CostPolynomial kScMemory[kMemRows] = {
    {{{{5}, 0, 2}, {{8}, 1, 1}, {{1}, 0, 1}}},            // gain
    {{{{6}, 1, 0}, {{3}, 0, 1}}},                         // state
    {{{{20}, 2, 0}, {{2}, 1, 1}, {{1}, 0, 0}}},           // covariance
    {{{{20}, 2, 0},
      {{5}, 0, 2},
      {{10}, 1, 1},
      {{6}, 1, 0},
      {{4}, 0, 1},
      {{1}, 0, 0}}},                                      // total
};

const CostPolynomial kDskfMemory[kMemRows] = {
    {{{{6}, 2, 0}, {{9}, 0, 2}, {{8}, 1, 1}, {{1}, 1, 0}, {{1}, 0, 1}}},  // gain
    {{{{2}, 1, 0}, {{4}, 0, 1}}},                                         // state
    {{{{9}, 2, 0}, {{1}, 1, 1}, {{1}, 0, 0}}},                            // covariance
    {{{{15}, 2, 0},
      {{9}, 0, 2},
      {{9}, 1, 1},
      {{3}, 1, 0},
      {{5}, 0, 1},
      {{1}, 0, 0}}},                                                      // total
};

void require_positive(long long n, long long m) {
  if (n < 1 || m < 1) {
    throw DimensionError("cost model: dimensions must be positive, got n=" + std::to_string(n) +
                         " m=" + std::to_string(m));
  }
}

}  // namespace

const CostPolynomial& flops_polynomial(Method method, FlopRow row) {
  const auto& table = method == Method::SC ? kScFlops : kDskfFlops;
  return table[static_cast<int>(row)];
}

const CostPolynomial& memory_polynomial(Method method, MemRow row) {
  const auto& table = method == Method::SC ? kScMemory : kDskfMemory;
  return table[static_cast<int>(row)];
}

CostBreakdown flops_model(Method method, long long n, long long m) {
  require_positive(n, m);
  CostBreakdown out;
  out.gain_mults = flops_polynomial(method, FlopRow::GainMults).evaluate(n, m);
  out.gain_adds = flops_polynomial(method, FlopRow::GainAdds).evaluate(n, m);
  out.state_mults = flops_polynomial(method, FlopRow::StateMults).evaluate(n, m);
  out.state_adds = flops_polynomial(method, FlopRow::StateAdds).evaluate(n, m);
  out.cov_mults = flops_polynomial(method, FlopRow::CovMults).evaluate(n, m);
  out.cov_adds = flops_polynomial(method, FlopRow::CovAdds).evaluate(n, m);
  out.total_flops = flops_polynomial(method, FlopRow::Total).evaluate(n, m);
  return out;
}

MemoryModel memory_model(Method method, long long n, long long m) {
  require_positive(n, m);
  MemoryModel out;
  out.gain_floats = memory_polynomial(method, MemRow::Gain).evaluate(n, m);
  out.state_floats = memory_polynomial(method, MemRow::State).evaluate(n, m);
  out.cov_floats = memory_polynomial(method, MemRow::Cov).evaluate(n, m);
  out.total_floats = memory_polynomial(method, MemRow::Total).evaluate(n, m);
  return out;
}

Matrix reduction_grid(Metric metric, Index n_max, Index m_max) {
  Matrix grid(n_max, m_max);
  for (Index n = 1; n <= n_max; ++n) {
    for (Index m = 1; m <= m_max; ++m) {
      Rational sc, dskf;
      if (metric == Metric::Flops) {
        sc = flops_model(Method::SC, n, m).total_flops;
        dskf = flops_model(Method::DSKF, n, m).total_flops;
      } else {
        sc = memory_model(Method::SC, n, m).total_floats;
        dskf = memory_model(Method::DSKF, n, m).total_floats;
      }
      const Rational reduction = (sc - dskf) * Rational(100);
      grid(n - 1, m - 1) = reduction.to_double() / sc.to_double();
    }
  }
  return grid;
}

namespace {

Matrix random_dense(RandomStream& rng, Index rows, Index cols) {
  Matrix a(rows, cols);
  for (double& v : a.data()) v = rng.next_in(-1.0, 1.0);
  return a;
}

}  // namespace

MeasuredComparison measured_comparison(Index n, Index m, int trials, RandomStream& rng) {
  require_positive(n, m);
  if (trials < 1) throw DimensionError("measured_comparison: trials must be positive");

  MeasuredComparison out;
  out.n = n;
  out.m = m;
  out.trials = trials;

  for (int trial = 0; trial < trials; ++trial) {
    SystemModel model;
    model.phi = random_transition(rng, n);
    model.b = random_dense(rng, n, 1);
    model.g = Matrix::identity(n);
    model.q_cov = random_spd_matrix(rng, n);
    const Matrix u = random_dense(rng, 1, 1);

    Belief anchor{random_dense(rng, n, 1), random_spd_matrix(rng, n)};
    AugmentedBelief aug = sc_predict(sc_clone(anchor), model, u);
    EpochTransition trans = accumulate(EpochTransition::initial(n), model, u);
    const Belief predicted = kf_predict(anchor, model, u);

    DelayedMeasurement meas;
    meas.h_prior = random_dense(rng, m, n);
    meas.h_current = random_dense(rng, m, n);
    meas.r_cov = random_spd_matrix(rng, m);
    meas.y = random_dense(rng, m, 1);

    OpCounter c_full, c_reduced, c_dskf;
    sc_update(aug, meas, &c_full);
    sc_update_reduced(aug, meas, &c_reduced);
    EpochTransition scratch = trans;
    dskf_update(predicted, scratch, meas, &c_dskf);

    if (trial == 0) {
      out.sc_full = c_full;
      out.sc_reduced = c_reduced;
      out.dskf = c_dskf;
    } else if (c_full.multiplications != out.sc_full.multiplications ||
               c_full.additions != out.sc_full.additions ||
               c_reduced.multiplications != out.sc_reduced.multiplications ||
               c_reduced.additions != out.sc_reduced.additions ||
               c_dskf.multiplications != out.dskf.multiplications ||
               c_dskf.additions != out.dskf.additions) {
      throw NumericError("measured_comparison: operation counts varied across trials");
    }
  }

  out.dskf_fewer_mults = out.dskf.multiplications < out.sc_full.multiplications;
  out.dskf_fewer_flops = out.dskf.total() < out.sc_full.total();
  return out;
}

}  // namespace dsf
