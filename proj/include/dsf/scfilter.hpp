#pragma once

#include "dsf/kf.hpp"
#include "dsf/models.hpp"

namespace dsf {

// Cloned state [x_j; x_k] with its joint 2n x 2n covariance. The clone block
// (top) holds the estimate at the anchor epoch j and stays fixed through
// predictions; the bottom block is the live state.
struct AugmentedBelief {
  Matrix mean_aug;  // 2n x 1
  Matrix cov_aug;   // 2n x 2n

  Index state_dim() const { return mean_aug.rows() / 2; }
  Belief current() const;  // bottom-block extraction
};

// Duplicates the belief: mean [x; x], covariance [[P, P], [P, P]].
AugmentedBelief sc_clone(const Belief& belief);

// Propagates only the current block; the clone stays put. Equivalent to the
// augmented transition [[I, 0], [0, phi]] with noise [[0, 0], [0, S]].
AugmentedBelief sc_predict(const AugmentedBelief& aug, const SystemModel& model,
                           const Matrix& u);

struct ScUpdateResult {
  AugmentedBelief augmented;
  Belief current;
};

// Full augmented update: a standard Joseph-form KF update on the 2n state with
// H_aug = [h_prior h_current]. Returns both the updated augmented belief and
// the extracted current-state belief.
ScUpdateResult sc_update(const AugmentedBelief& aug, const DelayedMeasurement& meas,
                         OpCounter* counter = nullptr);

// Computes only the bottom n rows of the augmented gain and the bottom-right
// block of the Joseph update. Matches sc_update's extracted belief bit for
// bit; exists for the cost comparison.
Belief sc_update_reduced(const AugmentedBelief& aug, const DelayedMeasurement& meas,
                         OpCounter* counter = nullptr);

}  // namespace dsf
