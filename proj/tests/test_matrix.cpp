#include <doctest.h>

#include "dsf/matrix.hpp"
#include "support.hpp"

using namespace dsf;

TEST_CASE("matmul identity counts and values") {
  OpCounter counter;
  const Matrix a{{3.0, -1.0}, {2.0, 5.0}};
  const Matrix c = matmul(Matrix::identity(2), a, &counter);
  CHECK(test::max_abs_diff(c, a) == 0.0);
  CHECK(counter.multiplications == 8);
  CHECK(counter.additions == 4);
}

TEST_CASE("matmul hand example") {
  const Matrix a{{1.0, 2.0}, {3.0, 4.0}};
  const Matrix b{{0.0}, {1.0}};
  const Matrix c = matmul(a, b);
  CHECK(c(0, 0) == 2.0);
  CHECK(c(1, 0) == 4.0);
}

TEST_CASE("matmul equals naive triple loop exactly on random shapes") {
  RandomStream rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const Index p = 1 + static_cast<Index>(rng.next_u64() % 8);
    const Index q = 1 + static_cast<Index>(rng.next_u64() % 8);
    const Index r = 1 + static_cast<Index>(rng.next_u64() % 8);
    const Matrix a = test::random_entries(rng, p, q, -5.0, 5.0);
    const Matrix b = test::random_entries(rng, q, r, -5.0, 5.0);
    CHECK(test::max_abs_diff(matmul(a, b), test::naive_matmul(a, b)) == 0.0);
  }
}

TEST_CASE("matmul rejects mismatched shapes naming both") {
  const Matrix a(2, 3);
  const Matrix b(2, 2);
  bool threw = false;
  try {
    matmul(a, b);
  } catch (const DimensionError& e) {
    threw = true;
    const std::string what = e.what();
    CHECK(what.find("2x3") != std::string::npos);
    CHECK(what.find("2x2") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("gauss_solve identity and scalar cases") {
  RandomStream rng(7);
  const Matrix b = test::random_entries(rng, 3, 2);
  CHECK(test::max_abs_diff(gauss_solve(Matrix::identity(3), b), b) == 0.0);

  const Matrix x = gauss_solve(Matrix{{2.0}}, Matrix{{6.0}});
  CHECK(x(0, 0) == 3.0);
}

TEST_CASE("gauss_solve rejects singular input") {
  const Matrix zero(2, 2);
  const Matrix b(2, 1);
  CHECK_THROWS_AS(gauss_solve(zero, b), SingularMatrixError);
  // Rank-deficient but nonzero.
  const Matrix rank1{{1.0, 2.0}, {2.0, 4.0}};
  CHECK_THROWS_AS(gauss_solve(rank1, b), SingularMatrixError);
}

TEST_CASE("gauss_solve inverse round trip and residual bound") {
  RandomStream rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.next_u64() % 6);
    Matrix a = test::random_entries(rng, n, n, -2.0, 2.0);
    if (test::condition_2norm(a) > 1e6) continue;

    const Matrix inv = gauss_solve(a, Matrix::identity(n));
    CHECK(test::max_abs_diff(matmul(a, inv), Matrix::identity(n)) <= 1e-8);

    const Matrix b = test::random_entries(rng, n, 2);
    const Matrix x = gauss_solve(a, b);
    const double residual = norm_inf(sub(matmul(a, x), b));
    CHECK(residual <= 1e-8 * (1.0 + norm_inf(a) * norm_inf(x)));
  }
}

TEST_CASE("gauss_solve counts scale cubically") {
  RandomStream rng(5);
  OpCounter small, large;
  gauss_solve(test::random_spd(rng, 4), Matrix::identity(4), &small);
  gauss_solve(test::random_spd(rng, 8), Matrix::identity(8), &large);
  CHECK(large.multiplications > 4 * small.multiplications);
  CHECK(small.multiplications > 0);
  CHECK(small.additions > 0);
}

TEST_CASE("gauss_solve counts match the closed form for a 2x2 single-rhs solve") {
  // Elimination: 1 division + 1 row mult/add + 1 rhs mult/add; back
  // substitution: 2 divisions + 1 mult/add. Totals: 6 mults, 3 adds.
  OpCounter counter;
  const Matrix a{{4.0, 1.0}, {2.0, 3.0}};
  const Matrix x = gauss_solve(a, vec({9.0, 8.0}), &counter);
  CHECK(counter.multiplications == 6);
  CHECK(counter.additions == 3);
  CHECK(test::max_abs_diff(matmul(a, x), vec({9.0, 8.0})) < 1e-14);
}

TEST_CASE("transpose, symmetrize, add, sub basics") {
  const Matrix a{{1.0, 2.0}, {3.0, 4.0}};
  const Matrix at = transpose(a);
  CHECK(at(0, 1) == 3.0);
  CHECK(at(1, 0) == 2.0);

  const Matrix sym{{2.0, 1.0}, {1.0, 5.0}};
  CHECK(test::max_abs_diff(symmetrize(sym), sym) == 0.0);

  OpCounter counter;
  Matrix neg = a;
  for (double& v : neg.data()) v = -v;
  const Matrix zero = add(a, neg, &counter);
  CHECK(max_abs(zero) == 0.0);
  CHECK(counter.additions == 4);

  CHECK(max_abs(sub(a, a, &counter)) == 0.0);
  CHECK(counter.additions == 8);
  CHECK_THROWS_AS(add(a, Matrix(3, 2)), DimensionError);
  CHECK_THROWS_AS(symmetrize(Matrix(2, 3)), DimensionError);
}

TEST_CASE("is_spd on the stated cases") {
  CHECK(is_spd(Matrix::identity(3), 1e-12));
  CHECK_FALSE(is_spd(Matrix{{1.0, 0.0}, {0.0, -1.0}}, 1e-12));

  const Matrix two_one{{2.0, 1.0}, {1.0, 2.0}};
  const auto eigs = test::jacobi_eigenvalues(two_one);
  CHECK(eigs.front() == doctest::Approx(1.0));
  CHECK(eigs.back() == doctest::Approx(3.0));
  CHECK(is_spd(two_one, 1e-12));

  CHECK_FALSE(is_spd(Matrix(2, 2), 1e-12));  // zero matrix
  Matrix asym{{1.0, 0.5}, {0.0, 1.0}};
  CHECK_FALSE(is_spd(asym, 1e-12));
}

TEST_CASE("is_psd accepts singular PSD matrices") {
  CHECK(is_psd(Matrix(3, 3), 1e-9));  // zero is PSD
  // Cloned-covariance shape [[P, P], [P, P]] is PSD but singular.
  RandomStream rng(11);
  const Matrix p = test::random_spd(rng, 3);
  Matrix cloned(6, 6);
  for (Index bi = 0; bi < 2; ++bi)
    for (Index bj = 0; bj < 2; ++bj) set_block(cloned, bi * 3, bj * 3, p);
  CHECK(is_psd(cloned, 1e-9));
  CHECK_FALSE(is_psd(Matrix{{1.0, 0.0}, {0.0, -1.0}}, 1e-9));
  CHECK_FALSE(is_psd(Matrix{{0.0, 1.0}, {1.0, 0.0}}, 1e-9));
}

TEST_CASE("counter closed-form totals for a scripted sequence") {
  RandomStream rng(3);
  OpCounter counter;
  const Matrix a = test::random_entries(rng, 3, 4);
  const Matrix b = test::random_entries(rng, 4, 2);
  matmul(a, b, &counter);  // 3*4*2 = 24 mults, 3*2*3 = 18 adds
  CHECK(counter.multiplications == 24);
  CHECK(counter.additions == 18);

  add(b, b, &counter);  // + 8 adds
  CHECK(counter.additions == 26);

  counter.reset();
  CHECK(counter.multiplications == 0);
  CHECK(counter.additions == 0);
}

TEST_CASE("block stacking round trips") {
  RandomStream rng(9);
  const Matrix a = test::random_entries(rng, 2, 3);
  const Matrix b = test::random_entries(rng, 2, 2);
  const Matrix h = hstack(a, b);
  CHECK(h.cols() == 5);
  CHECK(test::max_abs_diff(block(h, 0, 3, 2, 2), b) == 0.0);

  const Matrix v = vstack(a, test::random_entries(rng, 1, 3));
  CHECK(v.rows() == 3);
  CHECK_THROWS_AS(block(v, 2, 0, 2, 3), DimensionError);
}
