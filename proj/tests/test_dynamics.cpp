#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace accelode {
namespace {

using testing::Sampler;

constexpr double kEps = std::numeric_limits<double>::epsilon();

TEST(Coefficients, KappaOne) {
  const Coefficients c = coefficients(DampingSchedule::strongly_convex(1.0), 0.0);
  EXPECT_DOUBLE_EQ(c.d, 0.5);
  EXPECT_EQ(c.beta, 0.0);
}

TEST(Coefficients, KappaNine) {
  const Coefficients c = coefficients(DampingSchedule::strongly_convex(9.0), 3.0);
  EXPECT_DOUBLE_EQ(c.d, 0.25);
  EXPECT_DOUBLE_EQ(c.beta, 0.5);
}

TEST(Coefficients, TimeVarying) {
  const DampingSchedule s = DampingSchedule::non_strongly_convex();
  EXPECT_DOUBLE_EQ(coefficients(s, 1.0).d, 0.5);
  EXPECT_EQ(coefficients(s, 1.0).beta, 0.0);
  EXPECT_DOUBLE_EQ(coefficients(s, 0.0).beta, -0.5);
  EXPECT_DOUBLE_EQ(coefficients(s, 0.0).d, 0.75);
}

TEST(Coefficients, NegativeTimeRejected) {
  EXPECT_THROW(coefficients(DampingSchedule::non_strongly_convex(), -0.1), std::invalid_argument);
  EXPECT_THROW(DampingSchedule::strongly_convex(0.9), std::invalid_argument);
}

TEST(Coefficients, DampingSumIsOne) {
  for (double kappa : {1.0, 2.0, 5.0, 10.0, 100.0, 1e6}) {
    for (double t = 0.0; t <= 100.0; t += 0.5) {
      const Coefficients c = coefficients(DampingSchedule::strongly_convex(kappa), t);
      EXPECT_NEAR(2 * c.d + c.beta, 1.0, 2 * kEps);
    }
  }
  for (double t = 0.0; t <= 100.0; t += 0.01) {
    const Coefficients c = coefficients(DampingSchedule::non_strongly_convex(), t);
    EXPECT_NEAR(2 * c.d + c.beta, 1.0, 2 * kEps) << t;
  }
}

TEST(Coefficients, GammaScaling) {
  const DampingSchedule s = DampingSchedule::strongly_convex(16.0, 2.0);
  const Coefficients c = coefficients(s, 0.0);
  EXPECT_NEAR(2 * c.d * s.gamma + c.beta / s.gamma, 1.0, 2 * kEps);
}

TEST(NonPotentialForce, ZeroMomentum) {
  const Objective f = make_piecewise_gradient(5.0);
  const PhasePoint z = PhasePoint::scalar(1.7, 0.0);
  EXPECT_EQ(non_potential_force(f, DampingSchedule::strongly_convex(5.0), z, 0.0).norm(), 0.0);
}

TEST(NonPotentialForce, QuadraticReducesToMinusP) {
  Sampler s(5);
  for (double kappa : {1.0, 4.0, 30.0}) {
    const Objective f = make_quadratic({2.5});
    const PhasePoint z = s.phase(1, 3.0);
    const Vector fnp = non_potential_force(f, DampingSchedule::strongly_convex(kappa), z, 0.0);
    EXPECT_NEAR(fnp[0], -z.p[0], 1e-14);
  }
}

TEST(NonPotentialForce, PiecewiseHandEvaluation) {
  const Objective f = make_piecewise_gradient(5.0);
  const DampingSchedule s = DampingSchedule::strongly_convex(5.0);
  const Coefficients c = coefficients(s, 0.0);
  const Vector fnp = non_potential_force(f, s, PhasePoint::scalar(0.0, 1.0), 12.0);
  EXPECT_NEAR(fnp[0], -2 * c.d - c.beta, 1e-15);
  EXPECT_NEAR(fnp[0], -1.0, 1e-15);
}

TEST(VectorField, EquilibriumAtOrigin) {
  for (const Objective& f : testing::builtin_objectives()) {
    const PhasePoint v = vector_field(f, DampingSchedule::strongly_convex(f.kappa()),
                                      PhasePoint::zero(f.dim()), 0.0);
    EXPECT_EQ(v.norm(), 0.0);
  }
}

TEST(VectorField, UnitQuadratic) {
  const PhasePoint v = vector_field(make_quadratic({1.0}), DampingSchedule::strongly_convex(1.0),
                                    PhasePoint::scalar(1.0, 0.0), 0.0);
  EXPECT_EQ(v.q[0], 0.0);
  EXPECT_EQ(v.p[0], -1.0);
}

TEST(VectorField, MatchesCurvatureAveragedForm) {
  // dp = -(2d p + D p) - grad f(q)/L with D from quadrature of the Hessian.
  Sampler s(17);
  for (const Objective& f : testing::builtin_objectives()) {
    const DampingSchedule sched = DampingSchedule::strongly_convex(f.kappa());
    const Coefficients c = coefficients(sched, 0.0);
    for (int i = 0; i < 10; ++i) {
      const PhasePoint z = s.phase(f.dim(), 3.0);
      const Matrix d = curvature_average(f, z.q, z.p, c.beta, 4000);
      const Vector expected = -(2 * c.d * z.p + d * z.p) - f.gradient(z.q) / f.lipschitz();
      const PhasePoint v = vector_field(f, sched, z, 0.0);
      EXPECT_LT((v.p - expected).norm(), 5e-3 * std::max(1.0, z.p.norm())) << f.name();
      EXPECT_EQ((v.q - z.p).norm(), 0.0);
    }
  }
}

TEST(VectorField, DimensionMismatchRejected) {
  EXPECT_THROW(vector_field(make_quadratic({1.0, 2.0}), DampingSchedule::strongly_convex(2.0),
                            PhasePoint::scalar(1.0, 1.0), 0.0),
               std::invalid_argument);
}

TEST(Energy, Origin) {
  const EnergyReport e = energy(make_piecewise_gradient(5.0), DampingSchedule::strongly_convex(5.0),
                                PhasePoint::scalar(0.0, 0.0), 0.0);
  EXPECT_EQ(e.total, 0.0);
  EXPECT_EQ(e.dissipation_rate, 0.0);
}

TEST(Energy, TotalIsSumOfParts) {
  Sampler s(8);
  const Objective f = make_quadratic({5.0, 1.0});
  const PhasePoint z = s.phase(2, 2.0);
  const EnergyReport e = energy(f, DampingSchedule::strongly_convex(5.0), z, 0.0);
  EXPECT_DOUBLE_EQ(e.total, e.kinetic + e.potential);
  EXPECT_DOUBLE_EQ(e.kinetic, 0.5 * z.p.squaredNorm());
  EXPECT_DOUBLE_EQ(e.potential, f.value(z.q) / 5.0);
}

TEST(Energy, DissipationMatchesFiniteDifferenceOfH) {
  // dH/dt from the identity vs a central difference of H along the RK4 flow.
  Sampler s(21);
  for (const Objective& f : testing::builtin_objectives()) {
    const DampingSchedule sched = DampingSchedule::strongly_convex(f.kappa());
    const PhasePoint z = s.phase(f.dim(), 0.5);
    const double h = 1e-4;
    const PhasePoint zf = reference_flow(f, sched, z, 0.0, h, 4);
    // Backward in time: RK4 with a negative step (the schedule is autonomous).
    const PhasePoint zb = [&] {
      PhasePoint back = z;
      const double dt = h / 4;
      for (int i = 0; i < 4; ++i) {
        const PhasePoint k1 = vector_field(f, sched, back, 0.0);
        const PhasePoint k2 = vector_field(f, sched, PhasePoint(back.q - 0.5 * dt * k1.q, back.p - 0.5 * dt * k1.p), 0.0);
        const PhasePoint k3 = vector_field(f, sched, PhasePoint(back.q - 0.5 * dt * k2.q, back.p - 0.5 * dt * k2.p), 0.0);
        const PhasePoint k4 = vector_field(f, sched, PhasePoint(back.q - dt * k3.q, back.p - dt * k3.p), 0.0);
        back = PhasePoint(back.q - dt / 6 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q),
                          back.p - dt / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p));
      }
      return back;
    }();
    const double fd =
        (energy(f, sched, zf, 0.0).total - energy(f, sched, zb, 0.0).total) / (2 * h);
    const double analytic = energy(f, sched, z, 0.0).dissipation_rate;
    EXPECT_NEAR(fd, analytic, 1e-5 * std::max(1.0, std::abs(analytic))) << f.name();
  }
}

TEST(Energy, StronglyConvexDissipationSandwich) {
  Sampler s(99);
  for (const Objective& f : testing::builtin_objectives()) {
    const DampingSchedule sched = DampingSchedule::strongly_convex(f.kappa());
    const Coefficients c = coefficients(sched, 0.0);
    for (int i = 0; i < 1000; ++i) {
      const PhasePoint z = s.phase(f.dim(), 4.0);
      const double pp = z.p.squaredNorm();
      const double rate = energy(f, sched, z, 0.0).dissipation_rate;
      EXPECT_GE(rate, -pp * (1 + 1e-12) - 1e-14);
      EXPECT_LE(rate, -(2 * c.d + c.beta / f.kappa()) * pp * (1 - 1e-12) + 1e-14);
    }
  }
}

TEST(Energy, TimeVaryingDissipationSandwich) {
  Sampler s(100);
  const DampingSchedule sched = DampingSchedule::non_strongly_convex();
  for (const Objective& f : testing::builtin_objectives()) {
    for (int i = 0; i < 1000; ++i) {
      const PhasePoint z = s.phase(f.dim(), 4.0);
      const double t = s.uniform(0.0, 20.0);
      const double pp = z.p.squaredNorm();
      const double two_d = 2 * coefficients(sched, t).d;
      const double rate = energy(f, sched, z, t).dissipation_rate;
      const double lo = t >= 1.0 ? -pp : -two_d * pp;
      const double hi = t >= 1.0 ? -two_d * pp : -pp;
      EXPECT_GE(rate, lo - 1e-12 * (1 + pp)) << "t=" << t;
      EXPECT_LE(rate, hi + 1e-12 * (1 + pp)) << "t=" << t;
    }
  }
}

TEST(Schedule, GammaRescalesTime) {
  // x_gamma(t) = x_1(t / gamma) when p0 is scaled by 1/gamma.
  const Objective f = make_quadratic({5.0, 1.0});
  const double gamma = 2.0;
  Vector q0(2);
  q0 << 1.0, -0.5;
  Vector p0(2);
  p0 << 0.2, 0.4;
  const PhasePoint a = reference_flow(f, DampingSchedule::strongly_convex(5.0), PhasePoint(q0, p0), 0.0, 3.0, 3000);
  const PhasePoint b = reference_flow(f, DampingSchedule::strongly_convex(5.0, gamma),
                                      PhasePoint(q0, p0 / gamma), 0.0, 3.0 * gamma, 6000);
  EXPECT_LT((a.q - b.q).norm(), 1e-10);
  EXPECT_LT((a.p - gamma * b.p).norm(), 1e-10);
}

}  // namespace
}  // namespace accelode
