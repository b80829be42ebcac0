#pragma once

#include "accelode/dynamics.hpp"
#include "accelode/integrators.hpp"
#include "accelode/objective.hpp"
#include "accelode/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace accelode {

/// A point (q, p) of the two-dimensional phase space of a 1-D objective.
struct Point2 {
  double q = 0.0;
  double p = 0.0;

  PhasePoint to_phase() const { return PhasePoint::scalar(q, p); }
  static Point2 from_phase(const PhasePoint& z) { return {z.q[0], z.p[0]}; }
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.q - b.q, a.p - b.p); }
inline Point2 midpoint(Point2 a, Point2 b) { return {0.5 * (a.q + b.q), 0.5 * (a.p + b.p)}; }

/// Shoelace formula; counter-clockwise is positive. Coordinates are taken
/// relative to the first vertex to limit cancellation.
inline double signed_area(std::span<const Point2> v) {
  if (v.size() < 3) return 0.0;
  const Point2 o = v.front();
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % v.size()];
    twice += (a.q - o.q) * (b.p - o.p) - (b.q - o.q) * (a.p - o.p);
  }
  return 0.5 * twice;
}

namespace detail {

inline double orient(Point2 a, Point2 b, Point2 c) {
  return (b.q - a.q) * (c.p - a.p) - (b.p - a.p) * (c.q - a.q);
}

inline bool on_segment(Point2 a, Point2 b, Point2 c) {
  return std::min(a.q, b.q) <= c.q && c.q <= std::max(a.q, b.q) &&
         std::min(a.p, b.p) <= c.p && c.p <= std::max(a.p, b.p);
}

inline bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
    return true;
  }
  return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) ||
         (o3 == 0 && on_segment(c, d, a)) || (o4 == 0 && on_segment(c, d, b));
}

}  // namespace detail

/// True when no two non-adjacent edges of the closed polygon intersect.
/// Quadratic in the number of vertices.
inline bool is_simple(std::span<const Point2> v) {
  const std::size_t m = v.size();
  if (m < 3) return false;
  for (std::size_t i = 0; i < m; ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % m];
    if (a.q == b.q && a.p == b.p) return false;
    for (std::size_t j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;  // edges share vertex 0
      if (detail::segments_intersect(a, b, v[j], v[(j + 1) % m])) return false;
    }
  }
  return true;
}

/// Closed polygonal contour in the (q, p) plane; the last vertex connects to
/// the first.
class Contour {
 public:
  /// Validates: at least 3 vertices, simple, nonzero signed area.
  static Contour make(std::vector<Point2> vertices) {
    detail::require(vertices.size() >= 3, "Contour: need at least 3 vertices");
    detail::require(signed_area(vertices) != 0.0, "Contour: zero signed area");
    detail::require(is_simple(vertices), "Contour: polygon is not simple");
    return Contour(std::move(vertices));
  }

  /// No validation. Images of valid contours under a step may self-intersect
  /// or collapse, so evolved contours are built this way.
  static Contour trusted(std::vector<Point2> vertices) { return Contour(std::move(vertices)); }

  const std::vector<Point2>& vertices() const { return v_; }
  std::size_t size() const { return v_.size(); }

 private:
  explicit Contour(std::vector<Point2> v) : v_(std::move(v)) {}
  std::vector<Point2> v_;
};

inline double signed_area(const Contour& c) { return signed_area(std::span(c.vertices())); }

/// Contours whose area magnitude falls below this are reported as collapsed.
inline constexpr double kDegenerateArea = 1e-12;

inline bool is_degenerate(const Contour& c) { return std::abs(signed_area(c)) < kDegenerateArea; }

/// Diagonal of the bounding box.
inline double diameter(const Contour& c) {
  double qmin = INFINITY, qmax = -INFINITY, pmin = INFINITY, pmax = -INFINITY;
  for (const Point2& v : c.vertices()) {
    qmin = std::min(qmin, v.q);
    qmax = std::max(qmax, v.q);
    pmin = std::min(pmin, v.p);
    pmax = std::max(pmax, v.p);
  }
  return std::hypot(qmax - qmin, pmax - pmin);
}

inline int winding_number(const Contour& c, Point2 x) {
  int wn = 0;
  const auto& v = c.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % v.size()];
    if (a.p <= x.p) {
      if (b.p > x.p && detail::orient(a, b, x) > 0) ++wn;
    } else if (b.p <= x.p && detail::orient(a, b, x) < 0) {
      --wn;
    }
  }
  return wn;
}

/// Counter-clockwise regular polygon with m >= 16 vertices on a circle.
inline Contour circle_contour(Point2 center, double radius, int m) {
  detail::require(m >= 16, "circle_contour: need at least 16 vertices");
  detail::require(radius > 0, "circle_contour: radius must be positive");
  std::vector<Point2> v(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double th = 2.0 * std::numbers::pi * i / m;
    v[static_cast<std::size_t>(i)] = {center.q + radius * std::cos(th),
                                      center.p + radius * std::sin(th)};
  }
  return Contour::trusted(std::move(v));
}

/// Counter-clockwise polygon on the level set {1/2 p^2 + f(q)/L = energy} of
/// a 1-D convex objective, one vertex per ray from the origin. The boundary
/// point on each ray is found by bisection to 1e-10; H increases along rays
/// because both terms do.
inline Contour level_set_contour(const Objective& obj, double energy, int m) {
  detail::require(obj.dim() == 1, "level_set_contour: objective must be one-dimensional");
  detail::require(energy > 0 && std::isfinite(energy), "level_set_contour: energy must be positive");
  detail::require(m >= 16, "level_set_contour: need at least 16 vertices");
  Vector x(1);
  std::vector<Point2> v(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double th = 2.0 * std::numbers::pi * i / m;
    const double cq = std::cos(th);
    const double cp = std::sin(th);
    auto h_at = [&](double r) {
      x[0] = r * cq;
      return 0.5 * r * r * cp * cp + obj.value(x) / obj.lipschitz();
    };
    double lo = 0.0;
    double hi = 1.0;
    int grow = 0;
    while (h_at(hi) < energy) {
      lo = hi;
      hi *= 2.0;
      if (++grow > 200) {
        throw std::runtime_error("level_set_contour: could not bracket the level set");
      }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h_at(mid) < energy ? lo : hi) = mid;
    }
    const double r = 0.5 * (lo + hi);
    v[static_cast<std::size_t>(i)] = {r * cq, r * cp};
  }
  return Contour::trusted(std::move(v));
}

/// A refined pre-image together with its vertex-wise image.
struct MappedContour {
  Contour preimage;
  Contour image;
};

/// Maps every vertex through `map`. Wherever an image edge is longer than
/// `threshold`, the pre-image edge midpoint is inserted and mapped as well,
/// recursively, so the polygonal image follows the curved image of the
/// contour. Inserted points lie on pre-image edges, so the pre-image
/// polygon (and its area) is unchanged.
template <class Map>
MappedContour map_contour(const Contour& c, Map&& map, double threshold, int max_depth = 24,
                          std::size_t max_vertices = std::size_t{1} << 22) {
  detail::require(threshold > 0, "map_contour: threshold must be positive");
  const auto& v = c.vertices();
  std::vector<Point2> images(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) images[i] = map(v[i]);

  std::vector<Point2> pre;
  std::vector<Point2> img;
  pre.reserve(v.size());
  img.reserve(v.size());

  auto refine = [&](auto&& self, Point2 a, Point2 fa, Point2 b, Point2 fb, int depth) -> void {
    if (depth >= max_depth || pre.size() >= max_vertices || !(distance(fa, fb) > threshold)) {
      return;
    }
    const Point2 mid = midpoint(a, b);
    const Point2 fm = map(mid);
    self(self, a, fa, mid, fm, depth + 1);
    pre.push_back(mid);
    img.push_back(fm);
    self(self, mid, fm, b, fb, depth + 1);
  };

  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t j = (i + 1) % v.size();
    pre.push_back(v[i]);
    img.push_back(images[i]);
    refine(refine, v[i], images[i], v[j], images[j], 0);
  }
  return {Contour::trusted(std::move(pre)), Contour::trusted(std::move(img))};
}

/// Default refinement threshold: one percent of the contour diameter.
inline double default_refine_threshold(const Contour& c) { return 1e-2 * diameter(c); }

namespace detail {

inline void require_1d(const Objective& obj) {
  require(obj.dim() == 1, "contour operations need a one-dimensional objective");
}

inline auto discrete_map(const Objective& obj, const DampingSchedule& sched, double t,
                         const StepperConfig& cfg) {
  return [&obj, &sched, t, &cfg](Point2 x) {
    return Point2::from_phase(semi_implicit_step(obj, sched, x.to_phase(), t, cfg));
  };
}

}  // namespace detail

inline MappedContour map_contour_discrete(const Objective& obj, const DampingSchedule& sched,
                                          const Contour& c, double t, const StepperConfig& cfg,
                                          double refine_threshold) {
  detail::require_1d(obj);
  return map_contour(c, detail::discrete_map(obj, sched, t, cfg), refine_threshold);
}

/// Image of the contour under one semi-implicit Euler step.
inline Contour evolve_contour_discrete(const Objective& obj, const DampingSchedule& sched,
                                       const Contour& c, double t, const StepperConfig& cfg,
                                       double refine_threshold) {
  return map_contour_discrete(obj, sched, c, t, cfg, refine_threshold).image;
}

/// Closed trapezoid-rule line integral of f_NP dq along the polygon.
inline double non_potential_circulation(const Objective& obj, const DampingSchedule& sched,
                                        const Contour& c, double t) {
  detail::require_1d(obj);
  const auto& v = c.vertices();
  std::vector<double> force(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    force[i] = non_potential_force(obj, sched, v[i].to_phase(), t)[0];
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t j = (i + 1) % v.size();
    sum += 0.5 * (force[i] + force[j]) * (v[j].q - v[i].q);
  }
  return sum;
}

/// Settings for region integrals.
struct RegionQuadrature {
  /// Minimum number of horizontal slice pairs (constant p) across the polygon.
  int slices = 4096;
  /// Adaptive Simpson tolerance along a slice, relative to interval length.
  double tol = 1e-12;
  int max_depth = 48;
};

namespace detail {

template <class F>
double adaptive_simpson(F& g, double a, double b, double fa, double fm, double fb, double whole,
                        double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = g(lm);
  const double frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace detail

/// Integral of `g` over the polygon interior, weighted by winding number
/// (so counter-clockwise is positive). The polygon is cut into horizontal
/// bands between consecutive vertex heights, inside which every cross
/// section is a set of intervals with linearly moving ends. Each band gets
/// two-point Gauss-Legendre slices in p, and each slice is integrated over
/// the cross section with adaptive Simpson, which resolves jumps of the
/// integrand across curvature kinks.
template <class Integrand>
double region_integral(const Contour& c, Integrand&& g, const RegionQuadrature& quad = {}) {
  const auto& v = c.vertices();
  if (v.size() < 3) return 0.0;

  struct Edge {
    Point2 lo, hi;
    int dir;  // -1 upward, +1 downward
  };
  std::vector<Edge> edges;
  std::vector<double> levels;
  edges.reserve(v.size());
  levels.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& a = v[i];
    const Point2& b = v[(i + 1) % v.size()];
    levels.push_back(a.p);
    if (a.p == b.p) continue;
    edges.push_back(a.p < b.p ? Edge{a, b, -1} : Edge{b, a, 1});
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() < 2) return 0.0;
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) { return l.lo.p < r.lo.p; });
  const double target = (levels.back() - levels.front()) / quad.slices;

  struct Crossing {
    double q;
    int dir;
  };
  std::vector<const Edge*> active;
  std::vector<Crossing> xs;
  std::size_t next = 0;
  const double gl = 0.5 / std::numbers::sqrt3;

  auto slice = [&](double p) {
    xs.clear();
    for (const Edge* e : active) {
      const double s = (p - e->lo.p) / (e->hi.p - e->lo.p);
      xs.push_back({e->lo.q + s * (e->hi.q - e->lo.q), e->dir});
    }
    std::sort(xs.begin(), xs.end(), [](const Crossing& l, const Crossing& r) { return l.q < r.q; });
    auto line = [&](double q) { return g(Point2{q, p}); };
    double sum = 0.0;
    int winding = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      winding += xs[i].dir;
      const double a = xs[i].q;
      const double b = xs[i + 1].q;
      if (winding == 0 || !(b > a)) continue;
      const double fa = line(a);
      const double fb = line(b);
      const double fm = line(0.5 * (a + b));
      const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
      sum += winding * detail::adaptive_simpson(line, a, b, fa, fm, fb, whole, quad.tol * (b - a),
                                                quad.max_depth);
    }
    return sum;
  };

  double total = 0.0;
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
    const double lo = levels[j];
    const double hi = levels[j + 1];
    std::erase_if(active, [lo](const Edge* e) { return e->hi.p <= lo; });
    while (next < edges.size() && edges[next].lo.p <= lo) active.push_back(&edges[next++]);
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / target)));
    const double h = (hi - lo) / n;
    for (int k = 0; k < n; ++k) {
      const double mid = lo + (k + 0.5) * h;
      total += 0.5 * h * (slice(mid - gl * h) + slice(mid + gl * h));
    }
  }
  return total;
}

/// Phase-space divergence magnitude 2d + (beta/L) f''(q + beta p) of the
/// damped flow (1-D), with f'' by central differences of the gradient.
inline auto contraction_density(const Objective& obj, const DampingSchedule& sched, double t) {
  const Coefficients c = coefficients(sched, t);
  const double scale = sched.stiffness() / obj.lipschitz();
  return [&obj, c, scale](Point2 x) {
    if (c.beta == 0.0) return 2.0 * c.d;
    Vector y(1);
    y[0] = x.q + c.beta * x.p;
    return 2.0 * c.d + c.beta * scale * hessian_fd(obj, y)(0, 0);
  };
}

struct AreaContractionReport {
  double area_before = 0.0;
  double area_after = 0.0;
  /// area_after - area_before.
  double lhs = 0.0;
  /// -T_s * closed integral of f_NP dq.
  double line_integral = 0.0;
  /// -T_s * region integral of the contraction density.
  double region_integral = 0.0;
  Contour preimage = Contour::trusted({});
  Contour image = Contour::trusted({});
};

/// Computes the one-step area change of a contour three ways: directly from
/// the image polygon, as a line integral of the non-potential force, and as
/// a region integral of the flow divergence. All three agree up to
/// discretization error.
inline AreaContractionReport area_contraction_report(const Objective& obj,
                                                     const DampingSchedule& sched,
                                                     const Contour& c, double t,
                                                     const StepperConfig& cfg,
                                                     double refine_threshold = 0.0,
                                                     const RegionQuadrature& quad = {}) {
  detail::require_1d(obj);
  if (refine_threshold <= 0.0) refine_threshold = default_refine_threshold(c);
  MappedContour mapped = map_contour_discrete(obj, sched, c, t, cfg, refine_threshold);
  AreaContractionReport r;
  r.area_before = signed_area(mapped.preimage);
  r.area_after = signed_area(mapped.image);
  r.lhs = r.area_after - r.area_before;
  r.line_integral = -cfg.step_size * non_potential_circulation(obj, sched, mapped.preimage, t);
  r.region_integral =
      -cfg.step_size * region_integral(mapped.preimage, contraction_density(obj, sched, t), quad);
  r.preimage = std::move(mapped.preimage);
  r.image = std::move(mapped.image);
  return r;
}

/// dA/dt of the continuous flow for a contour at time t: minus the closed
/// integral of f_NP dq.
inline double continuous_area_rate(const Objective& obj, const DampingSchedule& sched,
                                   const Contour& c, double t) {
  return -non_potential_circulation(obj, sched, c, t);
}

/// Image of a contour under the RK4 flow from t0 to t1.
inline Contour evolve_contour_continuous(const Objective& obj, const DampingSchedule& sched,
                                         const Contour& c, double t0, double t1, long substeps,
                                         double refine_threshold) {
  detail::require_1d(obj);
  auto flow = [&](Point2 x) {
    return Point2::from_phase(reference_flow(obj, sched, x.to_phase(), t0, t1, substeps));
  };
  return map_contour(c, flow, refine_threshold).image;
}

struct AreaComparison {
  double initial_area = 0.0;
  double continuous_area = 0.0;
  double discrete_area = 0.0;
  double margin() const { return continuous_area - discrete_area; }
};

/// Encloses the energy level set with a polygon and compares the area after
/// one discrete step of size T_s with the area after continuous evolution
/// over [0, T_s]. The continuous one is expected to be the larger.
inline AreaComparison prop4_compare(const Objective& obj, const DampingSchedule& sched,
                                    double energy, double step_size, int m, long substeps = 0) {
  detail::require_1d(obj);
  detail::require(step_size > 0, "prop4_compare: step size must be positive");
  if (substeps <= 0) substeps = std::max(50L, static_cast<long>(std::ceil(step_size / 2e-3)));
  const Contour c = level_set_contour(obj, energy, m);
  const double thr = default_refine_threshold(c);
  AreaComparison out;
  out.initial_area = signed_area(c);
  out.continuous_area =
      signed_area(evolve_contour_continuous(obj, sched, c, 0.0, step_size, substeps, thr));
  out.discrete_area = signed_area(
      evolve_contour_discrete(obj, sched, c, 0.0, StepperConfig::with_step(step_size), thr));
  return out;
}

struct SlowTrajectoryRow {
  int k = 0;
  double area = 0.0;
  double max_radius = 0.0;
  double min_radius = 0.0;
  double bound = 0.0;  // R (1 - T_s (2d + beta/kappa))^(k/2)
  bool origin_enclosed = true;
};

struct SlowTrajectoryReport {
  std::vector<SlowTrajectoryRow> rows;
  /// max vertex distance >= R_k at every step.
  bool outer_bound_holds = true;
  /// origin enclosed and some vertex within R_k at every step.
  bool inner_bound_holds = true;
  bool pass() const { return outer_bound_holds; }
};

/// Relative slack allowed in the radius comparisons, covering polygon
/// sampling of the curved image.
inline constexpr double kRadiusTolerance = 1e-4;

/// Evolves the radius-R circle around the origin `steps` times and compares
/// vertex distances with R_k = R (1 - T_s (2d + beta/kappa))^(k/2), where d,
/// beta and kappa come from the (strongly convex) schedule.
inline SlowTrajectoryReport slowest_trajectory_bound(const Objective& obj,
                                                     const DampingSchedule& sched, double radius,
                                                     double step_size, int steps, int m) {
  detail::require_1d(obj);
  detail::require(step_size > 0 && step_size < 1, "slowest_trajectory_bound: need T_s in (0,1)");
  detail::require(sched.mode == DampingMode::StronglyConvex,
                  "slowest_trajectory_bound: needs a strongly convex schedule");
  const Coefficients co = coefficients(sched, 0.0);
  const double factor = 1.0 - step_size * (2.0 * co.d + co.beta / sched.kappa);
  const StepperConfig cfg = StepperConfig::with_step(step_size);

  SlowTrajectoryReport report;
  Contour c = circle_contour({0.0, 0.0}, radius, m);
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) {
      c = evolve_contour_discrete(obj, sched, c, static_cast<double>(k - 1) * step_size, cfg,
                                  default_refine_threshold(c));
    }
    SlowTrajectoryRow row;
    row.k = k;
    row.area = signed_area(c);
    row.max_radius = 0.0;
    row.min_radius = INFINITY;
    for (const Point2& x : c.vertices()) {
      const double r = std::hypot(x.q, x.p);
      row.max_radius = std::max(row.max_radius, r);
      row.min_radius = std::min(row.min_radius, r);
    }
    row.bound = radius * std::pow(factor, 0.5 * k);
    row.origin_enclosed = winding_number(c, {0.0, 0.0}) != 0;
    if (row.max_radius < row.bound * (1.0 - kRadiusTolerance)) report.outer_bound_holds = false;
    if (!row.origin_enclosed || row.min_radius > row.bound * (1.0 + kRadiusTolerance)) {
      report.inner_bound_holds = false;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace accelode
