#pragma once

#include "accelode/accelode.hpp"

#include <random>
#include <vector>

namespace accelode::testing {

inline std::vector<Objective> builtin_objectives() {
  return {make_quadratic({1.0}), make_quadratic({5.0, 1.0}), make_quadratic({100.0, 1.0}),
          make_quadratic({4.0, 2.0, 1.0}), make_piecewise_gradient(5.0)};
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vector vector(Eigen::Index n, double radius) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(-radius, radius);
    return v;
  }

  PhasePoint phase(Eigen::Index n, double radius) {
    Vector q = vector(n, radius);
    Vector p = vector(n, radius);
    return PhasePoint(std::move(q), std::move(p));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace accelode::testing
