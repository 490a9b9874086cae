#pragma once

#include <utility>
#include <vector>

#include "dsf/models.hpp"

namespace dsf {

// A full linear-Gaussian estimation problem: prior at epoch 0, one dynamics
// step per entry of `steps` (epoch t -> t+1), and delayed measurements tying
// epoch pairs (j, k), j < k. Measurements must be ordered by strictly
// increasing k with anchors not overlapping (j >= previous k).
struct TrajectoryProblem {
  Belief initial_belief;
  std::vector<std::pair<SystemModel, Matrix>> steps;  // (model, control)
  struct ScheduledMeasurement {
    Index anchor_epoch = 0;
    Index meas_epoch = 0;
    DelayedMeasurement meas;
  };
  std::vector<ScheduledMeasurement> measurements;

  Index epoch_count() const { return static_cast<Index>(steps.size()); }
  void validate() const;  // throws DimensionError on schedule violations
};

// Thrown when the batch information matrix is singular.
class UnobservableProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact single-update reference: forms the joint Gaussian of (x_j, x_k) from
// the anchor belief and the gap transition, conditions on the delayed
// measurement, and returns the marginal of x_k. Shares only the matrix layer
// with the filters; none of their update code.
Belief joint_condition(const Belief& prior_j, const EpochTransition& trans,
                       const DelayedMeasurement& meas);

// Full-information MAP over the whole trajectory by normal equations; returns
// the marginal belief at the final epoch. Requires every per-step noise
// covariance G*Q*G^T and measurement covariance to be SPD.
Belief batch_solve(const TrajectoryProblem& problem);

}  // namespace dsf
