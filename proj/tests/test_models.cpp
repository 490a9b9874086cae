#include <doctest.h>

#include "dsf/kf.hpp"
#include "dsf/models.hpp"
#include "support.hpp"

using namespace dsf;

namespace {

SystemModel random_model(RandomStream& rng, Index n) {
  SystemModel model;
  model.phi = test::random_invertible(rng, n);
  model.b = test::random_entries(rng, n, 1);
  model.g = test::random_invertible(rng, n);
  model.q_cov = test::random_spd(rng, n);
  return model;
}

}  // namespace

TEST_CASE("process_noise_cov basic cases") {
  RandomStream rng(31);
  const Matrix q = test::random_spd(rng, 3);
  CHECK(test::max_abs_diff(process_noise_cov(Matrix::identity(3), q), q) < 1e-15);

  const Matrix s = process_noise_cov(Matrix{{2.0}}, Matrix{{1.0}});
  CHECK(s(0, 0) == 4.0);
}

TEST_CASE("process_noise_cov equals the naive triple product and stays PSD") {
  RandomStream rng(32);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix g = test::random_entries(rng, 3, 2);
    const Matrix q = test::random_spd(rng, 2);
    const Matrix s = process_noise_cov(g, q);
    const Matrix oracle = test::naive_matmul(test::naive_matmul(g, q), transpose(g));
    CHECK(test::max_abs_diff(s, symmetrize(oracle)) < 1e-14 * (1.0 + max_abs(oracle)));
    CHECK(test::max_abs_diff(s, transpose(s)) == 0.0);  // exactly symmetric
    CHECK(test::psd_within(s, 1e-10));
  }
}

TEST_CASE("accumulate single step reproduces the step") {
  RandomStream rng(33);
  const SystemModel model = random_model(rng, 3);
  const Matrix u = test::random_entries(rng, 1, 1);
  const EpochTransition trans = accumulate(EpochTransition::initial(3), model, u);
  CHECK(test::max_abs_diff(trans.phi_accum, model.phi) == 0.0);
  CHECK(test::rel_close(trans.drift_accum, matmul(model.b, u)) < 1e-15);
  CHECK(test::rel_close(trans.s_accum, process_noise_cov(model.g, model.q_cov)) < 1e-15);
}

TEST_CASE("accumulate with identity transition sums the noise") {
  SystemModel model;
  model.phi = Matrix::identity(2);
  model.b = Matrix::zeros(2, 1);
  model.g = Matrix::identity(2);
  model.q_cov = Matrix{{0.3, 0.1}, {0.1, 0.2}};
  const Matrix u = Matrix::zeros(1, 1);

  EpochTransition trans = EpochTransition::initial(2);
  for (int i = 0; i < 3; ++i) trans = accumulate(trans, model, u);
  Matrix three_s = model.q_cov;
  for (double& v : three_s.data()) v *= 3.0;
  CHECK(test::max_abs_diff(trans.s_accum, three_s) < 1e-15);
  CHECK(max_abs(trans.drift_accum) == 0.0);
  CHECK(test::max_abs_diff(trans.phi_accum, Matrix::identity(2)) == 0.0);
}

TEST_CASE("accumulate over two steps equals hand-composed joint model") {
  RandomStream rng(34);
  const SystemModel m1 = random_model(rng, 3);
  const SystemModel m2 = random_model(rng, 3);
  const Matrix u1 = test::random_entries(rng, 1, 1);
  const Matrix u2 = test::random_entries(rng, 1, 1);

  EpochTransition trans = accumulate(EpochTransition::initial(3), m1, u1);
  trans = accumulate(trans, m2, u2);

  // x2 = phi2*phi1*x0 + (phi2*b1*u1 + b2*u2) + phi2*g1*w1 + g2*w2.
  const Matrix phi_joint = test::naive_matmul(m2.phi, m1.phi);
  const Matrix drift_joint = add(test::naive_matmul(m2.phi, matmul(m1.b, u1)), matmul(m2.b, u2));
  const Matrix s1 = process_noise_cov(m1.g, m1.q_cov);
  const Matrix s2 = process_noise_cov(m2.g, m2.q_cov);
  const Matrix s_joint =
      add(test::naive_matmul(test::naive_matmul(m2.phi, s1), transpose(m2.phi)), s2);

  CHECK(test::rel_close(trans.phi_accum, phi_joint) < 1e-14);
  CHECK(test::rel_close(trans.drift_accum, drift_joint) < 1e-14);
  CHECK(test::rel_close(trans.s_accum, symmetrize(s_joint)) < 1e-14);
}

TEST_CASE("accumulated transition predicts like the per-step chain") {
  RandomStream rng(35);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.next_u64() % 3);
    Belief belief{test::random_entries(rng, n, 1), test::random_spd(rng, n)};
    EpochTransition trans = EpochTransition::initial(n);
    Belief chained = belief;
    const int k = 2 + static_cast<int>(rng.next_u64() % 4);
    for (int i = 0; i < k; ++i) {
      const SystemModel model = random_model(rng, n);
      const Matrix u = test::random_entries(rng, 1, 1);
      chained = kf_predict(chained, model, u);
      trans = accumulate(trans, model, u);
    }
    // One effective step with the accumulated triple.
    const Matrix mean_once = add(matmul(trans.phi_accum, belief.mean), trans.drift_accum);
    const Matrix cov_once = symmetrize(
        add(matmul(matmul(trans.phi_accum, belief.cov), transpose(trans.phi_accum)),
            trans.s_accum));
    CHECK(test::rel_close(chained.mean, mean_once) < 1e-12);
    CHECK(test::rel_close(chained.cov, cov_once) < 1e-12);
  }
}

TEST_CASE("odometry_measurement block structure") {
  const DelayedMeasurement scalar = odometry_measurement(Matrix{{0.7}}, Matrix{{0.1}}, 1, 0);
  CHECK(scalar.h_prior(0, 0) == -1.0);
  CHECK(scalar.h_current(0, 0) == 1.0);
  CHECK(scalar.y(0, 0) == 0.7);

  const Matrix delta = vec({0.1, -0.2});
  const DelayedMeasurement pv = odometry_measurement(delta, Matrix::identity(2), 4, 0);
  CHECK(pv.h_prior(0, 0) == -1.0);
  CHECK(pv.h_prior(1, 1) == -1.0);
  CHECK(pv.h_current(0, 0) == 1.0);
  CHECK(pv.h_current(1, 1) == 1.0);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 2; j < 4; ++j) {
      CHECK(pv.h_prior(i, j) == 0.0);
      CHECK(pv.h_current(i, j) == 0.0);
    }
  // Relative-measurement structure: the blocks cancel.
  CHECK(max_abs(add(pv.h_prior, pv.h_current)) == 0.0);

  const DelayedMeasurement zero = odometry_measurement(Matrix::zeros(2, 1), Matrix::identity(2), 4, 1);
  CHECK(max_abs(zero.y) == 0.0);

  CHECK_THROWS_AS(odometry_measurement(delta, Matrix::identity(2), 3, 2), DimensionError);
}

TEST_CASE("simulate_step noiseless cases") {
  RandomStream rng(36);
  SystemModel model;
  model.phi = Matrix::identity(2);
  model.b = Matrix::zeros(2, 1);
  model.g = Matrix::identity(2);
  model.q_cov = Matrix(2, 2);  // zero: noiseless
  const Matrix u = Matrix::zeros(1, 1);

  const Matrix x = vec({1.0, 1.0});
  CHECK(test::max_abs_diff(simulate_step(x, model, u, rng), x) == 0.0);

  model.phi = Matrix{{2.0, 0.0}, {0.0, 2.0}};
  const Matrix doubled = simulate_step(x, model, u, rng);
  CHECK(doubled(0, 0) == 2.0);
  CHECK(doubled(1, 0) == 2.0);
}

TEST_CASE("simulate_step noise is unbiased over many draws") {
  RandomStream rng(37);
  SystemModel model;
  model.phi = Matrix::identity(1);
  model.b = Matrix::zeros(1, 1);
  model.g = Matrix::identity(1);
  model.q_cov = Matrix{{0.25}};
  const Matrix u = Matrix::zeros(1, 1);
  const Matrix x = vec({0.0});

  const int samples = 100000;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) sum += simulate_step(x, model, u, rng)(0, 0);
  const double sigma = 0.5;
  CHECK(std::fabs(sum / samples) < 4.0 * sigma / std::sqrt(static_cast<double>(samples)));
}
