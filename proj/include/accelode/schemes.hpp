#pragma once

#include "accelode/dynamics.hpp"
#include "accelode/integrators.hpp"
#include "accelode/objective.hpp"
#include "accelode/types.hpp"

#include <algorithm>
#include <utility>

namespace accelode {

/// Iterate x and extrapolated point y of the constant-step accelerated
/// gradient method.
struct NesterovState {
  Vector x;
  Vector y;

  NesterovState() = default;
  NesterovState(Vector x_in, Vector y_in) : x(std::move(x_in)), y(std::move(y_in)) {
    detail::require(x.size() == y.size(), "NesterovState: x and y dimensions differ");
  }
};

/// x' = y - (1/L) grad f(y),  y' = x' + beta (x' - x).
inline NesterovState nesterov_step(const Objective& obj, double beta, const NesterovState& s) {
  detail::require(s.x.size() == obj.dim(), "nesterov_step: dimension mismatch");
  Vector x_next = s.y - obj.gradient(s.y) / obj.lipschitz();
  Vector y_next = x_next + beta * (x_next - s.x);
  return NesterovState(std::move(x_next), std::move(y_next));
}

/// x = q, y = q + beta p.
inline NesterovState to_nesterov(const PhasePoint& z, double beta) {
  return NesterovState(z.q, z.q + beta * z.p);
}

/// q = x, p = (y - x) / beta. Requires beta != 0.
inline PhasePoint from_nesterov(const NesterovState& s, double beta) {
  detail::require(beta != 0.0, "from_nesterov: beta must be nonzero");
  return PhasePoint(s.x, (s.y - s.x) / beta);
}

/// Runs the semi-implicit Euler scheme at T_s = 1 (strongly convex
/// coefficients for `kappa`) side by side with nesterov_step started from
/// to_nesterov(z0) and returns max_k |x_k - q_k|. Both recursions run for
/// exactly `steps` steps; no early stopping.
inline double equivalence_check(const Objective& obj, double kappa, const PhasePoint& z0,
                                long steps) {
  detail::require_dims(obj, z0);
  const DampingSchedule sched = DampingSchedule::strongly_convex(kappa);
  const double beta = coefficients(sched, 0.0).beta;
  const StepperConfig cfg = StepperConfig::with_step(1.0);

  PhasePoint z = z0;
  NesterovState s = to_nesterov(z0, beta);
  double deviation = (s.x - z.q).norm();
  for (long k = 0; k < steps; ++k) {
    z = semi_implicit_step(obj, sched, z, static_cast<double>(k), cfg);
    s = nesterov_step(obj, beta, s);
    deviation = std::max(deviation, (s.x - z.q).norm());
  }
  return deviation;
}

}  // namespace accelode
