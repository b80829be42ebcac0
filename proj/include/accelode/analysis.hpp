#pragma once

#include "accelode/dynamics.hpp"
#include "accelode/integrators.hpp"
#include "accelode/objective.hpp"
#include "accelode/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace accelode {

/// One point of a Lyapunov monitor.
struct LyapunovSample {
  double t_or_k = 0.0;
  double value = 0.0;
  /// Decay rate the certificate promises at this point.
  double certified_rate = 0.0;
  /// Upper bound on `value` implied by that rate.
  double certified_bound = 0.0;
};

/// Thrown when a rate cannot be fitted (all-zero or too few usable samples).
class UndefinedRate : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline double floor_fraction() { return 1e-13; }

// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw UndefinedRate("degenerate abscissa in rate fit");
  return sxy / sxx;
}

// Log-linear fit of a positive decaying observable. Discards the first 10%
// of samples and samples below 1e-13 of the peak.
inline double log_slope(std::span<const double> x, std::span<const double> y,
                        std::size_t min_samples) {
  if (x.size() != y.size()) throw std::invalid_argument("rate fit: size mismatch");
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw UndefinedRate("rate fit: observable is identically zero");
  std::vector<double> xs, ys;
  for (std::size_t i = y.size() / 10; i < y.size(); ++i) {
    if (y[i] > floor_fraction() * peak) {
      xs.push_back(x[i]);
      ys.push_back(std::log(y[i]));
    }
  }
  if (xs.size() < min_samples) throw UndefinedRate("rate fit: too few usable samples");
  return ls_slope(xs, ys);
}

}  // namespace detail

// --- strongly convex flow -------------------------------------------------

/// a = 1/sqrt(kappa) - 1/(2 kappa), equal to d + beta/(2 kappa).
inline double lyapunov_rate(double kappa) {
  return 1.0 / std::sqrt(kappa) - 1.0 / (2.0 * kappa);
}

/// V(q, p) = 1/2 |a q + p|^2 + f(q)/L.
inline double lyapunov_V(const Objective& obj, double kappa, const PhasePoint& z) {
  detail::require_dims(obj, z);
  const double a = lyapunov_rate(kappa);
  return 0.5 * (a * z.q + z.p).squaredNorm() + obj.value(z.q) / obj.lipschitz();
}

struct ContinuousRateResult {
  /// -slope of log V(t) from a least-squares fit (NaN if V is zero).
  double measured_rate = 0.0;
  /// max over the grid of V(t) / (V(0) exp(-a t)).
  double max_ratio = 0.0;
  /// |z(t)| <= sqrt(c_hi/c_lo) |z0| exp(-a t / 2) on the grid.
  bool state_bound_holds = true;
  bool pass = true;
  std::vector<LyapunovSample> samples;
};

/// Integrates the strongly convex flow with RK4 and checks
/// V(t) <= V(0) exp(-a t) (1 + tol) at every grid point, and the state decay
/// at rate a/2 that follows from sandwiching V between two quadratic forms.
inline ContinuousRateResult check_prop1(const Objective& obj, double kappa, const PhasePoint& z0,
                                        double horizon, long substeps, double tol = 1e-3) {
  detail::require_dims(obj, z0);
  const DampingSchedule sched = DampingSchedule::strongly_convex(kappa);
  const double a = lyapunov_rate(kappa);
  ContinuousRateResult out;
  const double v0 = lyapunov_V(obj, kappa, z0);
  if (v0 == 0.0) {
    out.measured_rate = std::nan("");
    out.samples.push_back({0.0, 0.0, a, 0.0});
    return out;
  }

  // f(q)/L lies between |q|^2/(2 kappa) and |q|^2/2, so V is sandwiched by
  // two 2x2 quadratic forms in (q_i, p_i).
  auto extreme_eig = [a](double c, bool largest) {
    const double m11 = 0.5 * a * a + c, m12 = 0.5 * a, m22 = 0.5;
    const double tr = m11 + m22, det = m11 * m22 - m12 * m12;
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    return largest ? 0.5 * tr + disc : 0.5 * tr - disc;
  };
  const double c_lo = extreme_eig(0.5 / kappa, false);
  const double c_hi = extreme_eig(0.5, true);
  const double state_gain = std::sqrt(c_hi / c_lo);

  const TrajectoryRecord rec = reference_integrate(obj, sched, z0, 0.0, horizon, substeps);
  std::vector<double> ts, vs;
  for (std::size_t i = 0; i < rec.points.size(); ++i) {
    const double t = rec.times[i];
    const double v = lyapunov_V(obj, kappa, rec.points[i]);
    const double bound = v0 * std::exp(-a * t);
    out.max_ratio = std::max(out.max_ratio, v / bound);
    if (v > bound * (1.0 + tol)) out.pass = false;
    const double r = std::sqrt(rec.points[i].q.squaredNorm() + rec.points[i].p.squaredNorm());
    const double r0 = std::sqrt(z0.q.squaredNorm() + z0.p.squaredNorm());
    if (r > state_gain * r0 * std::exp(-0.5 * a * t) * (1.0 + tol)) {
      out.state_bound_holds = false;
    }
    out.samples.push_back({t, v, a, bound});
    ts.push_back(t);
    vs.push_back(v);
  }
  out.pass = out.pass && out.state_bound_holds && rec.status != TrajectoryStatus::Diverged;
  out.measured_rate = -detail::log_slope(ts, vs, 2);
  return out;
}

// --- non-strongly convex flow ---------------------------------------------

/// Vbar(t) = 1/2 |a(t) q + p|^2 + f(q)/L with a(t) = 2/(t+2).
inline double lyapunov_Vbar(const Objective& obj, const PhasePoint& z, double t) {
  detail::require_dims(obj, z);
  detail::require(t >= 0.0, "lyapunov_Vbar: t must be >= 0");
  const double a = 2.0 / (t + 2.0);
  return 0.5 * (a * z.q + z.p).squaredNorm() + obj.value(z.q) / obj.lipschitz();
}

/// Growth constant used in the O(1/t^2) bound on f.
inline constexpr double kGrowthConstant = 5.0 / 6.0;

struct SublinearRateResult {
  /// Vbar(t) <= 9 Vbar(1) / (t+2)^2 for all grid t >= 1.
  bool vbar_bound_holds = true;
  /// f(q(t))/L <= 9 (5/6) / (t+2)^2 (|q0|^2 + |p0|^2) for all grid t >= 1.
  bool value_bound_holds = true;
  /// Vbar(1) / (|q0|^2 + |p0|^2), the empirical growth constant.
  double growth_constant = 0.0;
  /// Log-log slope of the running-max envelope of f(q(t)) on [10, horizon]
  /// (NaN when the horizon is too short or f vanishes).
  double loglog_slope = 0.0;
  bool pass = true;
  std::vector<LyapunovSample> samples;
};

/// Integrates the time-varying flow on [0, 1] and [1, horizon] with RK4
/// and checks both O(1/t^2) bounds for t >= 1.
inline SublinearRateResult check_prop2(const Objective& obj, const PhasePoint& z0, double horizon,
                                       long substeps, double tol = 1e-9) {
  detail::require_dims(obj, z0);
  detail::require(horizon > 1.0, "check_prop2: horizon must exceed 1");
  const DampingSchedule sched = DampingSchedule::non_strongly_convex();
  SublinearRateResult out;
  const double r0sq = z0.q.squaredNorm() + z0.p.squaredNorm();
  if (r0sq == 0.0) {
    out.loglog_slope = std::nan("");
    return out;
  }

  const long head = std::max(1L, static_cast<long>(std::llround(substeps / horizon)));
  const PhasePoint z1 = reference_flow(obj, sched, z0, 0.0, 1.0, head);
  const double vbar1 = lyapunov_Vbar(obj, z1, 1.0);
  out.growth_constant = vbar1 / r0sq;

  const TrajectoryRecord rec =
      reference_integrate(obj, sched, z1, 1.0, horizon, std::max(1L, substeps - head));
  std::vector<double> ts, fs;
  for (std::size_t i = 0; i < rec.points.size(); ++i) {
    const double t = rec.times[i];
    const double w = 9.0 / ((t + 2.0) * (t + 2.0));
    const double vbar = lyapunov_Vbar(obj, rec.points[i], t);
    const double fval = obj.value(rec.points[i].q) / obj.lipschitz();
    if (vbar > w * vbar1 * (1.0 + tol) + 1e-300) out.vbar_bound_holds = false;
    if (fval > w * kGrowthConstant * r0sq * (1.0 + tol) + 1e-300) out.value_bound_holds = false;
    out.samples.push_back({t, vbar, 2.0 / (t + 2.0), w * vbar1});
    if (t >= 10.0) {
      ts.push_back(std::log(t));
      fs.push_back(fval);
    }
  }
  // Running max from the right: the smallest non-increasing envelope.
  for (std::size_t i = fs.size(); i-- > 1;) fs[i - 1] = std::max(fs[i - 1], fs[i]);
  out.loglog_slope = std::nan("");
  if (ts.size() >= 2 && fs.front() > 0.0) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (fs[i] > 0.0) {
        xs.push_back(ts[i]);
        ys.push_back(std::log(fs[i]));
      }
    }
    if (xs.size() >= 2) out.loglog_slope = detail::ls_slope(xs, ys);
  }
  out.pass = out.vbar_bound_holds && out.value_bound_holds &&
             rec.status != TrajectoryStatus::Diverged;
  return out;
}

// --- discrete scheme ------------------------------------------------------

/// Vhat in the shifted coordinates
///   qh = q + (tau - T_s) p,  tau = beta / (1 - 2 d T_s),
///   Vhat = 1/2 |d qh + (1 - d tau) p|^2 + f(qh)/L.
/// For kappa = 1 (beta = 0) tau is taken as 0, which also covers the
/// otherwise singular T_s = 1.
inline double lyapunov_Vhat(const Objective& obj, double kappa, double step_size,
                            const PhasePoint& z) {
  detail::require_dims(obj, z);
  detail::require(step_size > 0.0 && step_size <= 1.0, "lyapunov_Vhat: T_s must be in (0, 1]");
  const Coefficients c = coefficients(DampingSchedule::strongly_convex(kappa), 0.0);
  const double tau = c.beta == 0.0 ? 0.0 : c.beta / (1.0 - 2.0 * c.d * step_size);
  const Vector qh = z.q + (tau - step_size) * z.p;
  return 0.5 * (c.d * qh + (1.0 - c.d * tau) * z.p).squaredNorm() +
         obj.value(qh) / obj.lipschitz();
}

/// Smallest condition number for which the Vhat decrease is certified.
inline constexpr double kDiscreteRateMinKappa = 3.0;

struct DiscreteRateResult {
  int violations = 0;
  /// max over steps of Vhat_{k+1} / ((1 - d T_s) Vhat_k).
  double worst_ratio = 0.0;
  /// kappa >= 3; below that the run is informational only.
  bool certified = true;
  bool pass = true;
  std::vector<LyapunovSample> samples;
};

/// Runs the semi-implicit scheme for `steps` steps (no early stop) and counts
/// steps with Vhat_{k+1} > (1 - d T_s) Vhat_k (1 + 1e-12).
inline DiscreteRateResult check_prop7(const Objective& obj, double kappa, double step_size,
                                      const PhasePoint& z0, long steps) {
  detail::require_dims(obj, z0);
  const DampingSchedule sched = DampingSchedule::strongly_convex(kappa);
  const double d = coefficients(sched, 0.0).d;
  const double factor = 1.0 - d * step_size;
  StepperConfig cfg = StepperConfig::with_step(step_size);
  cfg.convergence_threshold = 0.0;
  const TrajectoryRecord rec = simulate(obj, sched, z0, steps, cfg);

  DiscreteRateResult out;
  out.certified = kappa >= kDiscreteRateMinKappa;
  double prev = lyapunov_Vhat(obj, kappa, step_size, rec.points.front());
  double bound = prev;
  out.samples.push_back({0.0, prev, d * step_size, bound});
  for (std::size_t k = 1; k < rec.points.size(); ++k) {
    const double v = lyapunov_Vhat(obj, kappa, step_size, rec.points[k]);
    if (prev > 0.0) {
      out.worst_ratio = std::max(out.worst_ratio, v / (factor * prev));
      if (v > factor * prev * (1.0 + 1e-12)) ++out.violations;
    } else if (v > 0.0) {
      ++out.violations;
    }
    bound *= factor;
    out.samples.push_back({static_cast<double>(k), v, d * step_size, bound});
    prev = v;
  }
  out.pass = out.violations == 0 && rec.status != TrajectoryStatus::Diverged;
  return out;
}

/// Fills record.lyapunov with Vhat along the trajectory.
inline void attach_vhat(TrajectoryRecord& rec, const Objective& obj, double kappa,
                        double step_size) {
  rec.lyapunov.clear();
  for (const PhasePoint& z : rec.points) {
    rec.lyapunov.push_back(lyapunov_Vhat(obj, kappa, step_size, z));
  }
}

enum class RateObservable { DistanceToOrigin, FunctionValue, Vhat };

/// Per-step geometric rate r such that observable_k ~ C r^k, from a
/// least-squares fit of log(observable) against k. The first 10% of samples
/// and samples below 1e-13 of the peak are discarded; at least 10 must
/// remain.
inline double fit_linear_rate(const TrajectoryRecord& rec, RateObservable observable) {
  std::vector<double> ks, ys;
  const std::size_t n = rec.points.size();
  for (std::size_t k = 0; k < n; ++k) {
    ks.push_back(static_cast<double>(k));
    switch (observable) {
      case RateObservable::DistanceToOrigin:
        ys.push_back(std::sqrt(rec.points[k].q.squaredNorm() + rec.points[k].p.squaredNorm()));
        break;
      case RateObservable::FunctionValue:
        ys.push_back(rec.energies.at(k).potential);
        break;
      case RateObservable::Vhat:
        if (rec.lyapunov.size() != n) {
          throw std::invalid_argument("fit_linear_rate: record has no Vhat values");
        }
        ys.push_back(rec.lyapunov[k]);
        break;
    }
  }
  return std::exp(detail::log_slope(ks, ys, 10));
}

/// Same fit on a bare sequence.
inline double fit_linear_rate(std::span<const double> sequence) {
  std::vector<double> ks(sequence.size());
  for (std::size_t k = 0; k < ks.size(); ++k) ks[k] = static_cast<double>(k);
  return std::exp(detail::log_slope(ks, sequence, 10));
}

}  // namespace accelode
