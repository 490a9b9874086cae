#pragma once

#include "dsf/models.hpp"

namespace dsf {

// Standard predict: mean <- phi*x + b*u, cov <- phi*P*phi^T + G*Q*G^T.
Belief kf_predict(const Belief& belief, const SystemModel& model, const Matrix& u);

// Standard update against y = h*x + v, v ~ N(0, r). The gain is obtained by a
// linear solve on the (symmetrized) innovation covariance, never an explicit
// inverse, and the covariance uses the Joseph form.
Belief kf_update(const Belief& belief, const Matrix& h, const Matrix& r, const Matrix& y,
                 OpCounter* counter = nullptr);

}  // namespace dsf
