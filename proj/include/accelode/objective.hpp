#pragma once

#include "accelode/types.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace accelode {

/// Smooth convex objective with its minimum normalized to f(0) = 0.
///
/// `kappa` is the declared condition number. Use +infinity for an objective
/// that is only smooth and convex. Instances are immutable after construction.
class Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  Objective(std::string name, Eigen::Index dim, double lipschitz, double kappa,
            ValueFn value, GradientFn gradient)
      : name_(std::move(name)),
        dim_(dim),
        lipschitz_(lipschitz),
        kappa_(kappa),
        value_(std::move(value)),
        gradient_(std::move(gradient)) {
    detail::require(dim_ > 0, "Objective: dimension must be positive");
    detail::require(lipschitz_ > 0 && std::isfinite(lipschitz_),
                    "Objective: Lipschitz constant must be positive and finite");
    detail::require(kappa_ >= 1, "Objective: condition number must be >= 1");
    detail::require(static_cast<bool>(value_) && static_cast<bool>(gradient_),
                    "Objective: value and gradient must be callable");
  }

  const std::string& name() const { return name_; }
  Eigen::Index dim() const { return dim_; }
  double lipschitz() const { return lipschitz_; }
  double kappa() const { return kappa_; }
  bool strongly_convex() const { return std::isfinite(kappa_); }

  double value(const Vector& x) const { return value_(x); }
  Vector gradient(const Vector& x) const { return gradient_(x); }

 private:
  std::string name_;
  Eigen::Index dim_;
  double lipschitz_;
  double kappa_;
  ValueFn value_;
  GradientFn gradient_;
};

/// f(x) = 1/2 x^T diag(entries) x.
inline Objective make_quadratic(std::span<const double> diag) {
  detail::require(!diag.empty(), "make_quadratic: empty diagonal");
  for (double v : diag) {
    detail::require(v > 0 && std::isfinite(v), "make_quadratic: entries must be positive");
  }
  Vector h = Eigen::Map<const Vector>(diag.data(), static_cast<Eigen::Index>(diag.size()));
  const double lmax = h.maxCoeff();
  const double lmin = h.minCoeff();
  return Objective(
      "quadratic", h.size(), lmax, lmax / lmin,
      [h](const Vector& x) { return 0.5 * x.dot(h.cwiseProduct(x)); },
      [h](const Vector& x) -> Vector { return h.cwiseProduct(x); });
}

inline Objective make_quadratic(std::initializer_list<double> diag) {
  std::vector<double> v(diag);
  return make_quadratic(std::span<const double>(v));
}

/// One-dimensional objective whose gradient has slope kappa outside [1, 2)
/// and slope 1 inside:
///
///   grad f(x) = kappa x               x < 1
///             = kappa - 1 + x         1 <= x < 2
///             = 1 - kappa + kappa x   x >= 2
///
/// f is the exact piecewise antiderivative with f(0) = 0, so it is continuous
/// and C^1 at the kinks. L = kappa, strong convexity modulus 1.
inline Objective make_piecewise_gradient(double kappa) {
  detail::require(kappa >= 1 && std::isfinite(kappa),
                  "make_piecewise_gradient: kappa must be >= 1");
  const double f1 = 0.5 * kappa;
  const double f2 = f1 + (kappa - 1.0) + 1.5;
  auto grad = [kappa](double x) {
    if (x < 1.0) return kappa * x;
    if (x < 2.0) return kappa - 1.0 + x;
    return 1.0 - kappa + kappa * x;
  };
  auto value = [kappa, f1, f2](double x) {
    if (x < 1.0) return 0.5 * kappa * x * x;
    if (x < 2.0) return f1 + (kappa - 1.0) * (x - 1.0) + 0.5 * (x * x - 1.0);
    return f2 + (1.0 - kappa) * (x - 2.0) + 0.5 * kappa * (x * x - 4.0);
  };
  return Objective(
      "piecewise", 1, kappa, kappa,
      [value](const Vector& x) { return value(x[0]); },
      [grad](const Vector& x) -> Vector { return Vector::Constant(1, grad(x[0])); });
}

/// Hessian by central differences of the gradient.
inline Matrix hessian_fd(const Objective& obj, const Vector& x, double step = 1e-5) {
  const Eigen::Index n = obj.dim();
  Matrix hess(n, n);
  Vector xp = x;
  Vector xm = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    xp[j] = x[j] + step;
    xm[j] = x[j] - step;
    hess.col(j) = (obj.gradient(xp) - obj.gradient(xm)) / (2.0 * step);
    xp[j] = x[j];
    xm[j] = x[j];
  }
  return hess;
}

/// Curvature-averaged damping D = (1/L) * integral_0^beta Hess f(q + tau p) dtau,
/// composite midpoint rule with `nodes` nodes. beta may be negative.
inline Matrix curvature_average(const Objective& obj, const Vector& q, const Vector& p,
                                double beta, int nodes) {
  detail::require(nodes >= 1, "curvature_average: nodes must be >= 1");
  detail::require(q.size() == obj.dim() && p.size() == obj.dim(),
                  "curvature_average: dimension mismatch");
  const Eigen::Index n = obj.dim();
  Matrix acc = Matrix::Zero(n, n);
  if (beta == 0.0) return acc;
  const double width = beta / nodes;
  for (int i = 0; i < nodes; ++i) {
    const double tau = (i + 0.5) * width;
    acc += hessian_fd(obj, q + tau * p);
  }
  return acc * (width / obj.lipschitz());
}

/// Worst observed violations of the smoothness and strong convexity
/// inequalities over random point pairs.
struct SamplingReport {
  /// max |grad f(x) - grad f(y)| / (L |x - y|); <= 1 for an L-smooth f.
  double max_lipschitz_ratio = 0.0;
  /// min of f(x) - f(y) - grad f(y)^T (x - y) - L/(2 kappa) |x - y|^2;
  /// >= 0 (up to roundoff) for a strongly convex f. Uses kappa = inf if the
  /// objective is not strongly convex.
  double min_convexity_slack = std::numeric_limits<double>::infinity();
};

inline SamplingReport sample_objective(const Objective& obj, int pairs, double radius,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-radius, radius);
  const double mu = obj.strongly_convex() ? obj.lipschitz() / obj.kappa() : 0.0;
  SamplingReport report;
  for (int i = 0; i < pairs; ++i) {
    Vector x(obj.dim());
    Vector y(obj.dim());
    for (Eigen::Index j = 0; j < obj.dim(); ++j) {
      x[j] = coord(rng);
      y[j] = coord(rng);
    }
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const Vector gy = obj.gradient(y);
    report.max_lipschitz_ratio = std::max(
        report.max_lipschitz_ratio, (obj.gradient(x) - gy).norm() / (obj.lipschitz() * dist));
    const double slack =
        obj.value(x) - obj.value(y) - gy.dot(x - y) - 0.5 * mu * dist * dist;
    report.min_convexity_slack = std::min(report.min_convexity_slack, slack);
  }
  return report;
}

}  // namespace accelode
