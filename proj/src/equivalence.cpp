#include "dsf/equivalence.hpp"

#include <algorithm>
#include <cmath>

#include "dsf/dskf.hpp"
#include "dsf/kf.hpp"
#include "dsf/oracle.hpp"
#include "dsf/scfilter.hpp"

namespace dsf {

double relative_diff(const Matrix& a, const Matrix& b) {
  const Matrix d = sub(a, b);
  const double scale = 1.0 + std::max(frobenius_norm(a), frobenius_norm(b));
  return frobenius_norm(d) / scale;
}

Matrix random_spd_matrix(RandomStream& rng, Index n) {
  Matrix a(n, n);
  for (double& v : a.data()) v = rng.next_in(-1.0, 1.0);
  Matrix s = matmul(a, transpose(a));
  for (Index i = 0; i < n; ++i) s(i, i) += 0.5 * n;
  return symmetrize(s);
}

Matrix random_transition(RandomStream& rng, Index n) {
  // I plus a perturbation with ||dPhi||_2 <= 0.25*sqrt(n) <= 0.62 for n <= 6,
  // so the 2-norm condition stays far below 1e3. The overall scale is random;
  // it leaves the condition number unchanged.
  Matrix phi = Matrix::identity(n);
  const double spread = 0.25 / std::sqrt(static_cast<double>(n));
  for (double& v : phi.data()) v += spread * rng.next_in(-1.0, 1.0);
  const double scale = rng.next_in(0.5, 2.0);
  for (double& v : phi.data()) v *= scale;
  return phi;
}

namespace {

struct TrialOutcome {
  double mean_diff = 0.0;
  double cov_diff = 0.0;
  double oracle_mean_diff = 0.0;
  double oracle_cov_diff = 0.0;
  double batch_mean_diff = 0.0;
  double batch_cov_diff = 0.0;
  int updates = 0;
};

TrialOutcome run_trial(Index n, Index m, Index steps, bool check_oracle, RandomStream rng) {
  TrialOutcome outcome;

  RandomStream model_rng = rng.split(1);
  RandomStream truth_rng = rng.split(2);
  RandomStream meas_rng = rng.split(3);

  TrajectoryProblem problem;
  problem.initial_belief.mean = Matrix(n, 1);
  for (Index i = 0; i < n; ++i) problem.initial_belief.mean(i, 0) = model_rng.next_in(-2.0, 2.0);
  problem.initial_belief.cov = random_spd_matrix(model_rng, n);

  for (Index t = 0; t < steps; ++t) {
    SystemModel model;
    model.phi = random_transition(model_rng, n);
    model.b = Matrix(n, 1);
    for (Index i = 0; i < n; ++i) model.b(i, 0) = model_rng.next_in(-1.0, 1.0);
    model.g = random_transition(model_rng, n);  // full-rank coupling keeps S SPD
    model.q_cov = random_spd_matrix(model_rng, n);
    Matrix u(1, 1);
    u(0, 0) = model_rng.next_in(-1.0, 1.0);
    problem.steps.emplace_back(std::move(model), std::move(u));
  }

  // Measurement epochs: random gaps of 1..5 steps, always ending at `steps`.
  std::vector<Index> meas_epochs;
  Index epoch = 0;
  while (epoch < steps) {
    epoch = std::min<Index>(steps, epoch + 1 + static_cast<Index>(model_rng.next_u64() % 5));
    meas_epochs.push_back(epoch);
  }

  // Simulate the truth and assemble measurements.
  std::vector<Matrix> truth;
  truth.push_back(add(problem.initial_belief.mean,
                      gaussian_vector(truth_rng, problem.initial_belief.cov)));
  for (Index t = 0; t < steps; ++t) {
    const auto& [model, u] = problem.steps[static_cast<std::size_t>(t)];
    truth.push_back(simulate_step(truth.back(), model, u, truth_rng));
  }

  Index anchor = 0;
  for (Index k : meas_epochs) {
    DelayedMeasurement meas;
    meas.h_prior = Matrix(m, n);
    meas.h_current = Matrix(m, n);
    for (double& v : meas.h_prior.data()) v = meas_rng.next_in(-1.0, 1.0);
    for (double& v : meas.h_current.data()) v = meas_rng.next_in(-1.0, 1.0);
    meas.r_cov = random_spd_matrix(meas_rng, m);
    const Matrix noise = gaussian_vector(meas_rng, meas.r_cov);
    meas.y = add(add(matmul(meas.h_prior, truth[static_cast<std::size_t>(anchor)]),
                     matmul(meas.h_current, truth[static_cast<std::size_t>(k)])),
                 noise);
    problem.measurements.push_back({anchor, k, meas});
    anchor = k;
  }

  // Run both filters side by side.
  Belief sc_belief = problem.initial_belief;
  Belief dskf_belief = problem.initial_belief;
  AugmentedBelief aug = sc_clone(sc_belief);
  EpochTransition trans = EpochTransition::initial(n);
  std::size_t next_meas = 0;

  for (Index t = 0; t < steps; ++t) {
    const auto& [model, u] = problem.steps[static_cast<std::size_t>(t)];
    aug = sc_predict(aug, model, u);
    dskf_belief = kf_predict(dskf_belief, model, u);
    trans = accumulate(trans, model, u);

    const Index now = t + 1;
    if (next_meas < problem.measurements.size() &&
        problem.measurements[next_meas].meas_epoch == now) {
      const auto& sched = problem.measurements[next_meas];

      Belief oracle_belief;
      if (check_oracle) {
        // The anchor belief is SC's clone block (identical to DSKF's by
        // induction); conditioning the joint Gaussian on y is the reference.
        Belief anchor_belief{block(aug.mean_aug, 0, 0, n, 1), block(aug.cov_aug, 0, 0, n, n)};
        oracle_belief = joint_condition(anchor_belief, trans, sched.meas);
      }

      const ScUpdateResult sc_result = sc_update(aug, sched.meas);
      sc_belief = sc_result.current;
      dskf_belief = dskf_update(dskf_belief, trans, sched.meas);

      outcome.mean_diff =
          std::max(outcome.mean_diff, relative_diff(sc_belief.mean, dskf_belief.mean));
      outcome.cov_diff =
          std::max(outcome.cov_diff, relative_diff(sc_belief.cov, dskf_belief.cov));
      if (check_oracle) {
        outcome.oracle_mean_diff = std::max(
            outcome.oracle_mean_diff, std::max(relative_diff(sc_belief.mean, oracle_belief.mean),
                                               relative_diff(dskf_belief.mean, oracle_belief.mean)));
        outcome.oracle_cov_diff = std::max(
            outcome.oracle_cov_diff, std::max(relative_diff(sc_belief.cov, oracle_belief.cov),
                                              relative_diff(dskf_belief.cov, oracle_belief.cov)));
      }
      ++outcome.updates;

      aug = sc_clone(sc_belief);
      next_meas++;
    }
  }

  if (check_oracle) {
    const Belief batch = batch_solve(problem);
    outcome.batch_mean_diff = std::max(relative_diff(sc_belief.mean, batch.mean),
                                       relative_diff(dskf_belief.mean, batch.mean));
    outcome.batch_cov_diff = std::max(relative_diff(sc_belief.cov, batch.cov),
                                      relative_diff(dskf_belief.cov, batch.cov));
  }
  return outcome;
}

}  // namespace

std::vector<EquivalenceCell> equivalence_sweep(Index n_lo, Index n_hi, Index m_lo, Index m_hi,
                                               const EquivalenceOptions& options) {
  if (n_lo < 1 || m_lo < 1 || n_hi < n_lo || m_hi < m_lo) {
    throw DimensionError("equivalence_sweep: ranges must satisfy 1 <= lo <= hi");
  }
  if (options.steps < 1 || options.trials < 1) {
    throw DimensionError("equivalence_sweep: steps and trials must be positive");
  }

  std::vector<EquivalenceCell> cells;
  RandomStream master(options.seed);
  for (Index n = n_lo; n <= n_hi; ++n) {
    for (Index m = m_lo; m <= m_hi; ++m) {
      EquivalenceCell cell;
      cell.n = n;
      cell.m = m;
      cell.trials = options.trials;
      RandomStream cell_rng =
          master.split(static_cast<std::uint64_t>(n) * 1000 + static_cast<std::uint64_t>(m));
      for (int trial = 0; trial < options.trials; ++trial) {
        const std::uint64_t trial_seed = cell_rng.next_u64();
        const TrialOutcome outcome =
            run_trial(n, m, options.steps, options.check_oracle, RandomStream(trial_seed));
        if (outcome.mean_diff > cell.max_mean_diff || outcome.cov_diff > cell.max_cov_diff) {
          cell.worst_trial_seed = trial_seed;
        }
        cell.max_mean_diff = std::max(cell.max_mean_diff, outcome.mean_diff);
        cell.max_cov_diff = std::max(cell.max_cov_diff, outcome.cov_diff);
        cell.max_oracle_mean_diff = std::max(cell.max_oracle_mean_diff, outcome.oracle_mean_diff);
        cell.max_oracle_cov_diff = std::max(cell.max_oracle_cov_diff, outcome.oracle_cov_diff);
        cell.max_batch_mean_diff = std::max(cell.max_batch_mean_diff, outcome.batch_mean_diff);
        cell.max_batch_cov_diff = std::max(cell.max_batch_cov_diff, outcome.batch_cov_diff);
        cell.updates += outcome.updates;
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

}  // namespace dsf
