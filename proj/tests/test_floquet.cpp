#include <gtest/gtest.h>

#include "equistab/floquet.hpp"
#include "helpers.hpp"

using namespace equistab;
using namespace testing_support;

namespace {

ProblemSpec fig1(int K = 32) { return unit_problem(3, half_turn_group(3), {K, K, 8 * K, 1e-6}); }

}  // namespace

TEST(EvaluateOrbit, LagrangeCircle) {
  const TrigLoop loop = lagrange_loop(8);
  const double r = std::cbrt(3.0) / std::sqrt(3.0);
  for (double t : {0.0, 0.7, 2.0, 5.5}) {
    const OrbitPoint p = evaluate_orbit(loop, t);
    for (int i = 0; i < 3; ++i) {
      const Vector x = p.x.segment(2 * i, 2), v = p.v.segment(2 * i, 2);
      EXPECT_NEAR(x.norm(), r, 1e-12);
      EXPECT_NEAR(v.norm(), r, 1e-12);  // omega = 1
      EXPECT_NEAR(x.dot(v), 0.0, 1e-12);
    }
  }
  EXPECT_TRUE(evaluate_orbit(loop, 0.3).x.isApprox(evaluate_orbit(loop, 0.3 + 2 * M_PI).x, 1e-12));
}

TEST(Monodromy, FreeParticleClosedForm) {
  const std::vector<double> m{1.0, 2.0, 4.0};
  const ProblemSpec spec(m, 2, half_turn_group(3), {8, 8, 64, 1e-6});
  const TrigLoop loop = lagrange_loop(8);
  const MonodromyResult r = monodromy(loop, spec, {MonodromyMode::analytic, 64, true});
  const int N = 6;
  Matrix expect = Matrix::Identity(2 * N, 2 * N);
  expect.topRightCorner(N, N) = 2 * M_PI * inverse_mass_diagonal(spec).asDiagonal();
  EXPECT_LE((r.monodromy - expect).cwiseAbs().maxCoeff(), 1e-12);
  for (const auto& z : r.multipliers) EXPECT_NEAR(std::abs(z - Complex(1.0)), 0.0, 1e-6);
  EXPECT_LE(r.det_residual, 1e-12);
  EXPECT_LE(r.symplectic_residual, 1e-12);
}

TEST(Monodromy, IdentityHasUnitMultipliers) {
  const auto ev = multipliers(Matrix::Identity(8, 8));
  ASSERT_EQ(ev.size(), 8u);
  for (const auto& z : ev) EXPECT_EQ(z, Complex(1.0));
  EXPECT_EQ(pairing_residual(ev), 0.0);
}

TEST(Multipliers, SortedWithExactConjugates) {
  Matrix m = Matrix::Zero(4, 4);
  m.topLeftCorner(2, 2) << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
  m(2, 2) = 3.0;
  m(3, 3) = 1.0 / 3.0;
  const auto ev = multipliers(m);
  EXPECT_NEAR(ev[0].real(), 3.0, 1e-14);
  EXPECT_EQ(ev[1], std::conj(ev[2]));
  EXPECT_NEAR(ev[3].real(), 1.0 / 3.0, 1e-14);
  EXPECT_LE(pairing_residual(ev), 1e-14);
}

TEST(Monodromy, LagrangeAgainstFlowDifferences) {
  const ProblemSpec spec = fig1();
  const TrigLoop loop = lagrange_loop(32);
  const MonodromyResult r = monodromy(loop, spec);
  EXPECT_NEAR(r.max_modulus, 85.0213, 0.05 * 85.0213);
  EXPECT_LE(r.det_residual, 1e-6);
  const double mnorm = r.monodromy.cwiseAbs().rowwise().sum().maxCoeff();
  EXPECT_LE(r.symplectic_residual, 1e-5 * mnorm * mnorm);
  EXPECT_LE(r.pairing_residual, 1e-3 * r.max_modulus);

  const PhaseState s0{loop.position(0.0), loop.velocity(0.0)};
  const double eps = 1e-6;
  for (int j : {0, 3, 7, 10}) {
    PhaseState a = s0, b = s0;
    (j < 6 ? a.x[j] : a.y[j - 6]) += eps;
    (j < 6 ? b.x[j] : b.y[j - 6]) -= eps;
    const PhaseState fa = integrate_flow(a, spec, loop.period(), 8192);
    const PhaseState fb = integrate_flow(b, spec, loop.period(), 8192);
    Vector col(12);
    col << (fa.x - fb.x) / (2 * eps), (fa.y - fb.y) / (2 * eps);
    EXPECT_LE((col - r.monodromy.col(j)).norm(), 1e-3 * std::max(1.0, col.norm())) << "column " << j;
  }
}

TEST(Monodromy, ModesAndStepDoubling) {
  const ProblemSpec spec = fig1();
  const TrigLoop loop = lagrange_loop(32);
  const double a = monodromy(loop, spec, {MonodromyMode::analytic, 4096, false}).max_modulus;
  const double b = monodromy(loop, spec, {MonodromyMode::analytic, 8192, false}).max_modulus;
  const double s = monodromy(loop, spec, {MonodromyMode::shooting, 4096, false}).max_modulus;
  EXPECT_LE(std::abs(a - b), 0.005 * b);
  EXPECT_LE(std::abs(a - s), 0.02 * a);
}

TEST(Monodromy, EulerLargeMultiplier) {
  const ProblemSpec spec = fig1();
  const MonodromyResult r = monodromy(euler_loop(32), spec);
  EXPECT_NEAR(r.max_modulus, 5.8982e4, 0.5 * 5.8982e4);
  EXPECT_NEAR(r.log10_max_modulus, std::log10(r.max_modulus), 1e-9);
  EXPECT_LE(r.pairing_residual, 1e-3 * r.max_modulus);
}

TEST(Monodromy, DimensionMismatch) {
  const ProblemSpec spec = fig1();
  EXPECT_THROW(monodromy(kepler_loop(32), spec), Error);
}

TEST(Verdict, Thresholds) {
  EXPECT_FALSE(stability_verdict(85.02).stable);
  EXPECT_TRUE(stability_verdict(1.0187, 0.05).stable);
  EXPECT_TRUE(stability_verdict(1.05).stable);
  EXPECT_FALSE(stability_verdict(1.0501).stable);
  EXPECT_NEAR(stability_verdict(1.0187).margin, 0.0313, 1e-12);
}
