#pragma once

#include "accelode/objective.hpp"
#include "accelode/types.hpp"

#include <cmath>
#include <limits>

namespace accelode {

enum class DampingMode {
  StronglyConvex,     // constant d, beta from the condition number
  NonStronglyConvex,  // time-varying d(t) = 3/(2(t+2)), beta(t) = (t-1)/(t+2)
  Undamped,           // d = beta = 0; conservative reference dynamics
};

/// Coefficient schedule of the damped oscillator
///   x'' + 2 d x' + 1/(L gamma^2) grad f(x + beta x') = 0.
///
/// gamma rescales time and is honored only in StronglyConvex mode.
struct DampingSchedule {
  DampingMode mode = DampingMode::StronglyConvex;
  double gamma = 1.0;
  double kappa = 1.0;

  static DampingSchedule strongly_convex(double kappa, double gamma = 1.0) {
    detail::require(kappa >= 1 && std::isfinite(kappa), "DampingSchedule: kappa must be >= 1");
    detail::require(gamma > 0 && std::isfinite(gamma), "DampingSchedule: gamma must be positive");
    return {DampingMode::StronglyConvex, gamma, kappa};
  }
  static DampingSchedule non_strongly_convex() {
    return {DampingMode::NonStronglyConvex, 1.0, std::numeric_limits<double>::infinity()};
  }
  static DampingSchedule undamped() { return {DampingMode::Undamped, 1.0, 1.0}; }

  /// Factor 1/gamma^2 multiplying every gradient term.
  double stiffness() const {
    return mode == DampingMode::StronglyConvex ? 1.0 / (gamma * gamma) : 1.0;
  }
};

struct Coefficients {
  double d = 0.0;
  double beta = 0.0;
};

inline Coefficients coefficients(const DampingSchedule& sched, double t) {
  detail::require(t >= 0.0, "coefficients: t must be >= 0");
  switch (sched.mode) {
    case DampingMode::StronglyConvex: {
      const double s = std::sqrt(sched.kappa);
      return {1.0 / ((s + 1.0) * sched.gamma), sched.gamma * (s - 1.0) / (s + 1.0)};
    }
    case DampingMode::NonStronglyConvex:
      return {3.0 / (2.0 * (t + 2.0)), (t - 1.0) / (t + 2.0)};
    case DampingMode::Undamped:
      break;
  }
  return {0.0, 0.0};
}

namespace detail {

inline void require_dims(const Objective& obj, const PhasePoint& z) {
  require(z.q.size() == obj.dim() && z.p.size() == obj.dim(),
          "phase point dimension does not match objective");
}

// f_NP with explicit coefficients and an optional precomputed grad f(q).
inline Vector non_potential(const Objective& obj, const Coefficients& c, double stiffness,
                            const Vector& q, const Vector& p, const Vector& grad_q) {
  const double scale = stiffness / obj.lipschitz();
  if (c.beta == 0.0) return -2.0 * c.d * p;
  return -2.0 * c.d * p - scale * (obj.gradient(q + c.beta * p) - grad_q);
}

}  // namespace detail

/// Non-potential force f_NP(q, p) = -2 d p - (1/L)(grad f(q + beta p) - grad f(q)).
inline Vector non_potential_force(const Objective& obj, const DampingSchedule& sched,
                                  const PhasePoint& z, double t) {
  detail::require_dims(obj, z);
  return detail::non_potential(obj, coefficients(sched, t), sched.stiffness(), z.q, z.p,
                               obj.gradient(z.q));
}

/// First-order form: dq/dt = p, dp/dt = -(1/L) grad f(q) + f_NP(q, p).
/// The returned PhasePoint holds (dq/dt, dp/dt).
inline PhasePoint vector_field(const Objective& obj, const DampingSchedule& sched,
                               const PhasePoint& z, double t) {
  detail::require_dims(obj, z);
  const double scale = sched.stiffness() / obj.lipschitz();
  const Vector grad_q = obj.gradient(z.q);
  Vector dp = -scale * grad_q +
              detail::non_potential(obj, coefficients(sched, t), sched.stiffness(), z.q, z.p,
                                    grad_q);
  return PhasePoint(z.p, std::move(dp));
}

struct EnergyReport {
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
  /// dH/dt along the flow, from the identity dH/dt = f_NP^T p.
  double dissipation_rate = 0.0;
};

inline EnergyReport energy(const Objective& obj, const DampingSchedule& sched,
                           const PhasePoint& z, double t) {
  detail::require_dims(obj, z);
  EnergyReport e;
  e.kinetic = 0.5 * z.p.squaredNorm();
  e.potential = sched.stiffness() * obj.value(z.q) / obj.lipschitz();
  e.total = e.kinetic + e.potential;
  e.dissipation_rate = non_potential_force(obj, sched, z, t).dot(z.p);
  return e;
}

}  // namespace accelode
