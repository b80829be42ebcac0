#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace accelode {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Position-momentum pair. `q` is identified with x and `p` with dx/dt.
struct PhasePoint {
  Vector q;
  Vector p;

  PhasePoint() = default;
  PhasePoint(Vector q_in, Vector p_in) : q(std::move(q_in)), p(std::move(p_in)) {
    if (q.size() != p.size()) {
      throw std::invalid_argument("PhasePoint: q and p dimensions differ");
    }
  }

  /// Convenience for the one-dimensional case.
  static PhasePoint scalar(double q, double p) {
    return PhasePoint(Vector::Constant(1, q), Vector::Constant(1, p));
  }

  static PhasePoint zero(Eigen::Index n) {
    return PhasePoint(Vector::Zero(n), Vector::Zero(n));
  }

  Eigen::Index dim() const { return q.size(); }

  /// |q| + |p|, the norm used for convergence and divergence tests.
  double norm() const { return q.norm() + p.norm(); }
};

/// Raised when a fixed-point iteration exhausts its iteration budget.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, int iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

namespace detail {

inline void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace detail

}  // namespace accelode
