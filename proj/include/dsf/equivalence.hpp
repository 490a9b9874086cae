#pragma once

#include <cstdint>
#include <vector>

#include "dsf/models.hpp"
#include "dsf/random.hpp"

namespace dsf {

// Randomized head-to-head trials of the cloning filter, the delayed-state
// filter, and the independent oracles on the same simulated trajectories.
// Discrepancies are scaled-relative: ||a-b|| / (1 + max(||a||, ||b||)), with
// the 2-norm for means and the Frobenius norm for covariances.
struct EquivalenceOptions {
  Index steps = 10;        // epochs per trial (measurement gaps partition them)
  int trials = 50;         // trials per (n, m) cell
  std::uint64_t seed = 1;  // master seed; each cell/trial derives a substream
  bool check_oracle = true;  // also run joint conditioning and the batch MAP
};

struct EquivalenceCell {
  Index n = 0, m = 0;
  int trials = 0;
  int updates = 0;  // delayed updates compared across all trials
  double max_mean_diff = 0.0;      // SC vs DSKF posterior means
  double max_cov_diff = 0.0;       // SC vs DSKF posterior covariances
  double max_oracle_mean_diff = 0.0;  // filters vs joint conditioning
  double max_oracle_cov_diff = 0.0;
  double max_batch_mean_diff = 0.0;   // final beliefs vs batch MAP marginal
  double max_batch_cov_diff = 0.0;
  std::uint64_t worst_trial_seed = 0;  // seed of the trial with the worst SC/DSKF gap
};

// Runs every (n, m) in the inclusive ranges. Deterministic for a fixed seed.
std::vector<EquivalenceCell> equivalence_sweep(Index n_lo, Index n_hi, Index m_lo, Index m_hi,
                                               const EquivalenceOptions& options);

double relative_diff(const Matrix& a, const Matrix& b);

// Random problem ingredients with bounded conditioning, shared by the sweep
// and the measured-cost benchmark.
Matrix random_spd_matrix(RandomStream& rng, Index n);
Matrix random_transition(RandomStream& rng, Index n);  // I + bounded perturbation

}  // namespace dsf
