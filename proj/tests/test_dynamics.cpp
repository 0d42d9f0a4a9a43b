#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace equistab;
using namespace testing_support;

namespace {

// Independent pair sum written from the definition.
double naive_potential(const Vector& x, const std::vector<double>& m, int d) {
  double u = 0.0;
  const int n = static_cast<int>(m.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j < i) u += m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(j)] / (x.segment(i * d, d) - x.segment(j * d, d)).norm();
  return u;
}

ProblemSpec plain(int n, int d) { return unit_problem(n, trivial_group(n, d)); }

}  // namespace

TEST(Potential, Examples) {
  const auto s2 = plain(2, 2);
  Vector x(4);
  x << 0, 0, 1, 0;
  EXPECT_DOUBLE_EQ(potential(x, s2), 1.0);
  const auto s3 = plain(3, 2);
  const double side = 1.7;
  Vector y(6);
  y << 0, 0, side, 0, side / 2, side * std::sqrt(3.0) / 2;
  EXPECT_NEAR(potential(y, s3), 3.0 / side, 1e-14);
  std::mt19937_64 rng(1);
  const ProblemSpec s4({1.0, 2.0, 0.5, 3.0}, 3, trivial_group(4, 3));
  for (int k = 0; k < 10; ++k) {
    const Vector z = random_configuration(rng, 4, 3);
    EXPECT_NEAR(potential(z, s4) / naive_potential(z, s4.masses(), 3), 1.0, 1e-14);
  }
  Vector c(4);
  c << 0, 0, 1e-7, 0;
  try {
    potential(c, s2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CollisionalConfiguration);
  }
}

TEST(GradPotential, Examples) {
  const auto s2 = plain(2, 2);
  Vector x(4);
  x << -0.5, 0, 0.5, 0;
  const Vector g = grad_potential(x, s2);
  EXPECT_NEAR(g[0], 1.0, 1e-14);
  EXPECT_NEAR(g[1], 0.0, 1e-14);

  const TrigLoop lag = lagrange_loop(1);
  const auto s3 = plain(3, 2);
  const Vector p = lag.position(0.0);
  EXPECT_LT((grad_potential(p, s3) + p).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(HessPotential, TwoBodyBlock) {
  const auto s2 = plain(2, 2);
  Vector x(4);
  x << 0, 0, 1, 0;
  const Matrix h = hess_potential(x, s2);
  // Off-diagonal block is  d^2 U / dx_1 dx_2 = m1 m2 (I / r^3 - 3 r r^T / r^5) = diag(-2, 1).
  EXPECT_TRUE(h.block(0, 2, 2, 2).isApprox(diag({-2.0, 1.0}), 1e-14));
  EXPECT_TRUE(h.block(0, 0, 2, 2).isApprox(diag({2.0, -1.0}), 1e-14));
}

TEST(Dynamics, FiniteDifferenceConsistency) {
  std::mt19937_64 rng(2024);
  int cases = 0;
  for (int n : {2, 3, 4})
    for (int d : {2, 3})
      for (int rep = 0; rep < 9; ++rep) {
        std::uniform_real_distribution<double> U(0.5, 2.0);
        std::vector<double> m(static_cast<std::size_t>(n));
        for (auto& v : m) v = U(rng);
        const ProblemSpec spec(m, d, trivial_group(n, d));
        const Vector x = random_configuration(rng, n, d);
        const Vector g = grad_potential(x, spec);
        const Matrix h = hess_potential(x, spec);
        const double eps = 1e-6;
        Vector gfd(x.size());
        Matrix hfd(x.size(), x.size());
        for (int k = 0; k < x.size(); ++k) {
          Vector a = x, b = x;
          a[k] += eps;
          b[k] -= eps;
          gfd[k] = (potential(a, spec) - potential(b, spec)) / (2 * eps);
          hfd.col(k) = (grad_potential(a, spec) - grad_potential(b, spec)) / (2 * eps);
        }
        EXPECT_LT((gfd - g).norm() / g.norm(), 1e-6);
        EXPECT_LT((hfd - h).norm() / h.norm(), 1e-5);
        EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-12 * h.cwiseAbs().maxCoeff());
        for (int c = 0; c < d; ++c) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) s += g[i * d + c];
          EXPECT_LT(std::abs(s), 1e-12 * g.cwiseAbs().maxCoeff());
        }
        for (int i = 0; i < n; ++i) {
          Matrix row = Matrix::Zero(d, d);
          for (int j = 0; j < n; ++j) row += h.block(i * d, j * d, d, d);
          EXPECT_LT(row.cwiseAbs().maxCoeff(), 1e-10 * h.cwiseAbs().maxCoeff());
        }
        ++cases;
      }
  EXPECT_GE(cases, 50);
}

TEST(Dynamics, ForcesAreEquivariant) {
  const auto g = eight_group();
  const auto spec = unit_problem(3, g);
  std::mt19937_64 rng(8);
  const Vector x = random_configuration(rng, 3, 2);
  const Vector f = grad_potential(x, spec);
  for (const auto& e : g.elements()) {
    const Vector gx = flatten(act_on_configuration(e, unflatten(x, 3, 2)));
    const Vector gf = flatten(act_on_configuration(e, unflatten(f, 3, 2)));
    EXPECT_LT((grad_potential(gx, spec) - gf).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(VectorField, Examples) {
  const auto s3 = plain(3, 2);
  const TrigLoop lag = lagrange_loop(1);
  PhaseState st{lag.position(0.0), Vector::Zero(6)};
  const PhaseState f = vector_field(st, s3);
  EXPECT_TRUE(f.x.isZero(0));
  EXPECT_TRUE(f.y.isApprox(grad_potential(st.x, s3)));
  // Relative equilibrium: acceleration = -omega^2 x with omega = 1.
  st.y = lag.velocity(0.0);
  EXPECT_LT((vector_field(st, s3).y + st.x).norm(), 1e-12);
}

TEST(VectorField, KeplerReturnsAfterOnePeriod) {
  const auto s2 = plain(2, 2);
  const TrigLoop kep = kepler_loop(1);
  const PhaseState s0{kep.position(0.0), kep.velocity(0.0)};
  const PhaseState s1 = integrate_flow(s0, s2, 2 * M_PI, 4096);
  EXPECT_LT((s1.x - s0.x).norm() + (s1.y - s0.y).norm(), 1e-8);
}

TEST(VectorField, LagrangeEnergyDrift) {
  const auto s3 = plain(3, 2);
  const TrigLoop lag = lagrange_loop(1);
  const PhaseState s0{lag.position(0.0), lag.velocity(0.0)};
  const PhaseState s1 = integrate_flow(s0, s3, 2 * M_PI, 4096);
  EXPECT_LT(std::abs(hamiltonian(s1, s3) / hamiltonian(s0, s3) - 1.0), 1e-7);
}

TEST(Linearization, StructureAndJacobian) {
  std::mt19937_64 rng(4);
  const ProblemSpec spec({1.0, 2.0, 3.0}, 2, trivial_group(3, 2));
  const Vector x = random_configuration(rng, 3, 2);
  const Matrix A = linearization_matrix(x, spec);
  EXPECT_EQ(A.trace(), 0.0);
  EXPECT_TRUE(A.topLeftCorner(6, 6).isZero(0));
  EXPECT_TRUE(A.bottomRightCorner(6, 6).isZero(0));
  std::normal_distribution<double> N;
  Vector y(6), v(12);
  for (auto& a : y) a = N(rng);
  for (auto& a : v) a = N(rng);
  const double eps = 1e-6;
  const PhaseState p{x + eps * v.head(6), y + eps * v.tail(6)};
  const PhaseState q{x - eps * v.head(6), y - eps * v.tail(6)};
  const PhaseState fp = vector_field(p, spec), fq = vector_field(q, spec);
  Vector fd(12);
  fd << (fp.x - fq.x) / (2 * eps), (fp.y - fq.y) / (2 * eps);
  EXPECT_LT((fd - A * v).norm() / (A * v).norm(), 1e-6);
  EXPECT_TRUE(linearization_matrix(x, plain(3, 2)).topRightCorner(6, 6).isIdentity(0));
}
