#pragma once

#include "accelode/dynamics.hpp"
#include "accelode/objective.hpp"
#include "accelode/types.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace accelode {

struct StepperConfig {
  double step_size = 1.0;
  double divergence_threshold = 1e6;
  double convergence_threshold = 1e-12;
  double fixed_point_tol = 1e-12;
  int fixed_point_max_iter = 200;

  static StepperConfig with_step(double step_size) {
    detail::require(step_size > 0 && std::isfinite(step_size),
                    "StepperConfig: step size must be positive");
    StepperConfig cfg;
    cfg.step_size = step_size;
    return cfg;
  }
};

enum class TrajectoryStatus { Converged, MaxSteps, Diverged };

inline const char* to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::Converged: return "converged";
    case TrajectoryStatus::MaxSteps: return "max_steps";
    case TrajectoryStatus::Diverged: return "diverged";
  }
  return "unknown";
}

struct TrajectoryRecord {
  std::vector<PhasePoint> points;
  std::vector<double> times;
  std::vector<EnergyReport> energies;
  /// Optional per-point Lyapunov values, filled by the analysis monitors.
  std::vector<double> lyapunov;
  TrajectoryStatus status = TrajectoryStatus::MaxSteps;
  long gradient_evaluations = 0;

  /// Number of steps taken (points minus the initial state).
  std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }

  void push(const Objective& obj, const DampingSchedule& sched, PhasePoint z, double t) {
    energies.push_back(energy(obj, sched, z, t));
    points.push_back(std::move(z));
    times.push_back(t);
  }
};

namespace detail {

inline bool diverged(const PhasePoint& z, double threshold) {
  const double n = z.norm();
  return !std::isfinite(n) || n > threshold;
}

}  // namespace detail

/// One semi-implicit Euler step:
///   p' = p + T_s (-(1/L) grad f(q) + f_NP(q, p))
///   q' = q + T_s p'
/// with coefficients sampled at time t. The sum is accumulated as
/// (p + T_s f_NP) - T_s grad f(q) / L so that it agrees bit for bit with
/// split_step.
inline PhasePoint semi_implicit_step(const Objective& obj, const DampingSchedule& sched,
                                     const PhasePoint& z, double t, const StepperConfig& cfg) {
  detail::require_dims(obj, z);
  const double h = cfg.step_size;
  const double scale = sched.stiffness() / obj.lipschitz();
  const Vector grad_q = obj.gradient(z.q);
  const Vector fnp =
      detail::non_potential(obj, coefficients(sched, t), sched.stiffness(), z.q, z.p, grad_q);
  Vector p_next = z.p + h * fnp - (h * scale) * grad_q;
  Vector q_next = z.q + h * p_next;
  return PhasePoint(std::move(q_next), std::move(p_next));
}

struct SplitStep {
  PhasePoint intermediate;  // after the non-conservative momentum update
  PhasePoint next;          // after the symplectic Euler step
};

/// The same step as a non-conservative momentum kick followed by a
/// symplectic Euler step on the conservative part.
inline SplitStep split_step(const Objective& obj, const DampingSchedule& sched,
                            const PhasePoint& z, double t, const StepperConfig& cfg) {
  detail::require_dims(obj, z);
  const double h = cfg.step_size;
  const double scale = sched.stiffness() / obj.lipschitz();
  const Vector grad_q = obj.gradient(z.q);
  const Vector fnp =
      detail::non_potential(obj, coefficients(sched, t), sched.stiffness(), z.q, z.p, grad_q);
  PhasePoint mid(z.q, z.p + h * fnp);

  // Symplectic Euler: momentum from the gradient at q_bar, then position.
  Vector p_next = mid.p - (h * scale) * obj.gradient(mid.q);
  Vector q_next = mid.q + h * p_next;
  return {std::move(mid), PhasePoint(std::move(q_next), std::move(p_next))};
}

/// Symplectic sub-step alone, f_NP switched off.
inline PhasePoint symplectic_euler_step(const Objective& obj, const DampingSchedule& sched,
                                        const PhasePoint& z, const StepperConfig& cfg) {
  detail::require_dims(obj, z);
  const double h = cfg.step_size;
  const double scale = sched.stiffness() / obj.lipschitz();
  Vector p_next = z.p - (h * scale) * obj.gradient(z.q);
  Vector q_next = z.q + h * p_next;
  return PhasePoint(std::move(q_next), std::move(p_next));
}

struct InverseResult {
  PhasePoint point;
  int iterations = 0;
};

/// Inverse of semi_implicit_step. The symplectic part is undone in closed
/// form; the momentum kick p_bar = p + T_s f_NP(q, p) is solved for p by the
/// fixed-point iteration p <- p_bar - T_s f_NP(q, p) from p = 0, which
/// contracts with factor k = T_s (2d + beta) = T_s. Iteration stops once the
/// a-posteriori error bound k/(1-k) |p_new - p| is below
/// fixed_point_tol * max(1, |p|).
inline InverseResult inverse_step_detailed(const Objective& obj, const DampingSchedule& sched,
                                           const PhasePoint& z_next, double t,
                                           const StepperConfig& cfg) {
  detail::require_dims(obj, z_next);
  const double h = cfg.step_size;
  const double scale = sched.stiffness() / obj.lipschitz();
  const Coefficients c = coefficients(sched, t);

  const Vector q_bar = z_next.q - h * z_next.p;
  const Vector grad_bar = obj.gradient(q_bar);
  const Vector p_bar = z_next.p + (h * scale) * grad_bar;

  const double k = h * (2.0 * std::abs(c.d) + std::abs(c.beta) * sched.stiffness());
  const double gain = k < 1.0 ? k / (1.0 - k) : 1.0;
  Vector p = Vector::Zero(obj.dim());
  for (int iter = 1; iter <= cfg.fixed_point_max_iter; ++iter) {
    Vector p_new =
        p_bar - h * detail::non_potential(obj, c, sched.stiffness(), q_bar, p, grad_bar);
    const double change = (p_new - p).norm();
    p = std::move(p_new);
    if (gain * change <= cfg.fixed_point_tol * std::max(1.0, p.norm())) {
      return {PhasePoint(q_bar, std::move(p)), iter};
    }
    if (!std::isfinite(change)) break;
  }
  throw NonConvergence("inverse_step: fixed-point iteration did not converge",
                       cfg.fixed_point_max_iter);
}

inline PhasePoint inverse_step(const Objective& obj, const DampingSchedule& sched,
                               const PhasePoint& z_next, double t, const StepperConfig& cfg) {
  return inverse_step_detailed(obj, sched, z_next, t, cfg).point;
}

namespace detail {

inline PhasePoint rk4_step(const Objective& obj, const DampingSchedule& sched,
                           const PhasePoint& z, double t, double h) {
  const PhasePoint k1 = vector_field(obj, sched, z, t);
  const PhasePoint k2 = vector_field(
      obj, sched, PhasePoint(z.q + 0.5 * h * k1.q, z.p + 0.5 * h * k1.p), t + 0.5 * h);
  const PhasePoint k3 = vector_field(
      obj, sched, PhasePoint(z.q + 0.5 * h * k2.q, z.p + 0.5 * h * k2.p), t + 0.5 * h);
  const PhasePoint k4 =
      vector_field(obj, sched, PhasePoint(z.q + h * k3.q, z.p + h * k3.p), t + h);
  return PhasePoint(z.q + (h / 6.0) * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
                    z.p + (h / 6.0) * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p));
}

}  // namespace detail

/// Classical RK4 over `substeps` uniform steps on [t0, t1]. Every
/// `record_stride`-th state is recorded, and the final state always is.
/// Status is MaxSteps when the horizon is reached, Diverged when the state
/// norm exceeds the threshold.
inline TrajectoryRecord reference_integrate(const Objective& obj, const DampingSchedule& sched,
                                            const PhasePoint& z0, double t0, double t1,
                                            long substeps, long record_stride = 1,
                                            double divergence_threshold = 1e6) {
  detail::require_dims(obj, z0);
  detail::require(t1 > t0, "reference_integrate: t1 must exceed t0");
  detail::require(substeps >= 1 && record_stride >= 1,
                  "reference_integrate: substeps and stride must be positive");
  const double h = (t1 - t0) / static_cast<double>(substeps);
  TrajectoryRecord rec;
  rec.push(obj, sched, z0, t0);
  PhasePoint z = z0;
  for (long i = 0; i < substeps; ++i) {
    z = detail::rk4_step(obj, sched, z, t0 + static_cast<double>(i) * h, h);
    rec.gradient_evaluations += 8;
    const bool last = i + 1 == substeps;
    const bool bad = detail::diverged(z, divergence_threshold);
    if (last || bad || (i + 1) % record_stride == 0) {
      rec.push(obj, sched, z, last ? t1 : t0 + static_cast<double>(i + 1) * h);
    }
    if (bad) {
      rec.status = TrajectoryStatus::Diverged;
      return rec;
    }
  }
  rec.status = TrajectoryStatus::MaxSteps;
  return rec;
}

/// Final state of the RK4 flow on [t0, t1] without building a record.
inline PhasePoint reference_flow(const Objective& obj, const DampingSchedule& sched,
                                 PhasePoint z, double t0, double t1, long substeps) {
  detail::require_dims(obj, z);
  detail::require(t1 > t0 && substeps >= 1, "reference_flow: bad interval");
  const double h = (t1 - t0) / static_cast<double>(substeps);
  for (long i = 0; i < substeps; ++i) {
    z = detail::rk4_step(obj, sched, z, t0 + static_cast<double>(i) * h, h);
  }
  return z;
}

/// Iterates semi_implicit_step with coefficients sampled at t_k = k T_s.
/// Stops early when |q| + |p| drops below cfg.convergence_threshold
/// (Converged) or exceeds cfg.divergence_threshold (Diverged).
inline TrajectoryRecord simulate(const Objective& obj, const DampingSchedule& sched,
                                 const PhasePoint& z0, long steps, const StepperConfig& cfg) {
  detail::require_dims(obj, z0);
  detail::require(steps >= 1, "simulate: steps must be >= 1");
  TrajectoryRecord rec;
  rec.push(obj, sched, z0, 0.0);
  if (z0.norm() < cfg.convergence_threshold) {
    rec.status = TrajectoryStatus::Converged;
    return rec;
  }
  PhasePoint z = z0;
  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * cfg.step_size;
    rec.gradient_evaluations += coefficients(sched, t).beta != 0.0 ? 2 : 1;
    z = semi_implicit_step(obj, sched, z, t, cfg);
    const bool bad = detail::diverged(z, cfg.divergence_threshold);
    const bool done = !bad && z.norm() < cfg.convergence_threshold;
    // Non-finite states are not recorded; energies would be meaningless.
    if (std::isfinite(z.norm())) {
      rec.push(obj, sched, z, static_cast<double>(k + 1) * cfg.step_size);
    }
    if (bad) {
      rec.status = TrajectoryStatus::Diverged;
      return rec;
    }
    if (done) {
      rec.status = TrajectoryStatus::Converged;
      return rec;
    }
  }
  rec.status = TrajectoryStatus::MaxSteps;
  return rec;
}

}  // namespace accelode
