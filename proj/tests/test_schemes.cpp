#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace accelode {
namespace {

using testing::Sampler;

TEST(NesterovStep, ZeroStaysZero) {
  const NesterovState s = nesterov_step(make_quadratic({5.0, 1.0}), 0.4,
                                        NesterovState(Vector::Zero(2), Vector::Zero(2)));
  EXPECT_EQ(s.x.norm(), 0.0);
  EXPECT_EQ(s.y.norm(), 0.0);
}

TEST(NesterovStep, ZeroMomentumIsGradientDescent) {
  const NesterovState s = nesterov_step(make_quadratic({1.0}), 0.0,
                                        NesterovState(Vector::Ones(1), Vector::Ones(1)));
  EXPECT_EQ(s.x[0], 0.0);
  EXPECT_EQ(s.y[0], 0.0);
}

TEST(NesterovStep, AcceleratedRateOnQuadratic) {
  const Objective f = make_quadratic({5.0, 1.0});
  const double beta = coefficients(DampingSchedule::strongly_convex(5.0), 0.0).beta;
  Sampler s(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x0 = s.vector(2, 2.0);
    NesterovState st(x0, x0);
    for (int k = 0; k < 50; ++k) st = nesterov_step(f, beta, st);
    EXPECT_LE(f.value(st.x), 10.0 * f.value(x0) * std::pow(1.0 - 1.0 / std::sqrt(5.0), 50));
  }
}

TEST(NesterovStep, RejectsDimensionMismatch) {
  EXPECT_THROW(nesterov_step(make_quadratic({1.0}), 0.5, NesterovState(Vector::Ones(2), Vector::Ones(2))),
               std::invalid_argument);
  EXPECT_THROW(NesterovState(Vector::Ones(2), Vector::Ones(1)), std::invalid_argument);
}

TEST(ChangeOfVariables, Examples) {
  const NesterovState a = to_nesterov(PhasePoint::scalar(1.0, 2.0), 0.0);
  EXPECT_EQ(a.x[0], 1.0);
  EXPECT_EQ(a.y[0], 1.0);
  const NesterovState b = to_nesterov(PhasePoint::scalar(1.0, 2.0), 0.5);
  EXPECT_EQ(b.x[0], 1.0);
  EXPECT_EQ(b.y[0], 2.0);
  EXPECT_THROW(from_nesterov(b, 0.0), std::invalid_argument);
}

TEST(ChangeOfVariables, RoundTrip) {
  Sampler s(12);
  for (int i = 0; i < 1000; ++i) {
    const PhasePoint z = s.phase(3, 5.0);
    const double beta = s.uniform(0.05, 1.0);
    const PhasePoint back = from_nesterov(to_nesterov(z, beta), beta);
    EXPECT_EQ(back.q, z.q);
    EXPECT_LT((back.p - z.p).norm(), 1e-13 * (1.0 + z.norm()) / beta);
  }
}

TEST(EquivalenceCheck, OriginHasZeroDeviation) {
  EXPECT_EQ(equivalence_check(make_quadratic({5.0, 1.0}), 5.0, PhasePoint::zero(2), 100), 0.0);
}

TEST(EquivalenceCheck, QuadraticsMatchToRoundoff) {
  Sampler s(13);
  for (const Objective& f : testing::builtin_objectives()) {
    if (f.name() != "quadratic") continue;
    for (int trial = 0; trial < 50; ++trial) {
      EXPECT_LT(equivalence_check(f, f.kappa(), s.phase(f.dim(), 1.0), 100), 1e-12);
    }
  }
}

TEST(EquivalenceCheck, PiecewiseMatchesToRoundoff) {
  const Objective f = make_piecewise_gradient(5.0);
  EXPECT_LT(equivalence_check(f, 5.0, PhasePoint::scalar(3.0, 0.0), 50), 1e-10);
  Sampler s(14);
  for (int trial = 0; trial < 50; ++trial) {
    EXPECT_LT(equivalence_check(f, 5.0, PhasePoint::scalar(s.uniform(-2.0, 5.0), s.uniform(-1.0, 1.0)), 100),
              1e-10);
  }
}

TEST(EquivalenceCheck, UnitConditionNumberIsGradientDescent) {
  // kappa = 1 gives beta = 0 and both schemes reduce to x' = x - grad f(x)/L.
  const Objective f = make_quadratic({3.0, 1.0});
  const PhasePoint z0(Vector::Ones(2), Vector::Zero(2));
  const DampingSchedule sched = DampingSchedule::strongly_convex(1.0);
  const TrajectoryRecord rec = simulate(f, sched, z0, 20, [] {
    StepperConfig cfg = StepperConfig::with_step(1.0);
    cfg.convergence_threshold = 0.0;
    return cfg;
  }());
  Vector x = z0.q;
  NesterovState st(x, x);
  for (std::size_t k = 1; k < rec.points.size(); ++k) {
    x = x - f.gradient(x) / f.lipschitz();
    st = nesterov_step(f, 0.0, st);
    EXPECT_LT((rec.points[k].q - x).norm(), 1e-15);
    EXPECT_LT((st.x - x).norm(), 1e-15);
  }
  EXPECT_LT(equivalence_check(f, 1.0, z0, 20), 1e-15);
}

}  // namespace
}  // namespace accelode
