#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace equistab;
using namespace testing_support;

TEST(TimeAction, CompositionRules) {
  const auto r = TimeAction::rotation(1, 3);
  const auto s = TimeAction::reflection(1, 4);
  EXPECT_EQ(r * r * r, TimeAction::identity());
  EXPECT_EQ(s * s, TimeAction::identity());
  EXPECT_EQ(r * r.inverse(), TimeAction::identity());
  EXPECT_EQ(TimeAction::rotation(4, 6), TimeAction::rotation(2, 3));
  EXPECT_EQ(TimeAction::rotation(-1, 3), TimeAction::rotation(2, 3));
  for (double t : {0.1, 1.7, 4.0}) {
    const double T = 2 * M_PI;
    auto same = [T](double a, double b) { return std::abs(std::remainder(a - b, T)) < 1e-12; };
    EXPECT_TRUE(same((r * s).apply(t, T), r.apply(s.apply(t, T), T)));
    EXPECT_TRUE(same((s * r).apply(t, T), s.apply(r.apply(t, T), T)));
  }
}

TEST(BuildGroup, TrivialGroup) {
  const auto g = trivial_group(3, 2);
  EXPECT_EQ(g.order(), 1);
  EXPECT_EQ(g.quotient_order(), 1);
  EXPECT_DOUBLE_EQ(g.period(), M_PI);
}

TEST(BuildGroup, HalfTurn) {
  const auto g = half_turn_group(3);
  EXPECT_EQ(g.order(), 2);
  EXPECT_EQ(g.kernel_tau().size(), 1u);
  EXPECT_EQ(g.quotient_order(), 2);
  EXPECT_DOUBLE_EQ(g.period(), 2 * M_PI);
  ASSERT_EQ(g.coset_reps().size(), 2u);
  EXPECT_TRUE(g.coset_reps()[0].tau.is_identity());
  EXPECT_EQ(g.coset_reps()[1].tau, TimeAction::rotation(1, 2));
}

TEST(BuildGroup, NontrivialKernel) {
  Permutation sigma(10);
  for (int i = 0; i < 5; ++i) {
    sigma[static_cast<std::size_t>(i)] = (i + 1) % 5;
    sigma[static_cast<std::size_t>(i + 5)] = 5 + (i + 1) % 5;
  }
  std::vector<GroupElement> gens{element(planar_rotation(2 * M_PI / 5), sigma, {}, "k"),
                                 element(-Matrix::Identity(2, 2), identity_permutation(10), TimeAction::rotation(1, 2), "r")};
  const auto g = build_group(gens, 10, 2);
  EXPECT_EQ(g.kernel_tau().size(), 5u);
  EXPECT_EQ(g.quotient_order(), 2);
  EXPECT_EQ(g.order(), 10);
}

TEST(BuildGroup, Closure) {
  const auto g = eight_group();
  EXPECT_EQ(g.order(), 6);
  EXPECT_EQ(g.quotient_order(), 6);
  for (const auto& a : g.elements())
    for (const auto& b : g.elements()) {
      const auto p = a * b;
      bool found = false;
      for (const auto& c : g.elements()) found |= c.same_action(p) && c.tau == p.tau;
      EXPECT_TRUE(found);
    }
}

TEST(BuildGroup, Errors) {
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = 0.1;
  try {
    build_group({element(bad, {0, 1})}, 2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonOrthogonalRho);
  }
  try {
    build_group({element(planar_rotation(1.0), {0, 1})}, 2, 2, 64);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GroupNotClosed);
  }
  try {
    // rho = -I with a shift of 1/3: r^2 = identity in space but 2/3 in time.
    build_group({element(-Matrix::Identity(2, 2), {0, 1}, TimeAction::rotation(1, 3))}, 2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentTau);
  }
}

TEST(ActOnConfiguration, Examples) {
  Matrix c(2, 2);
  c << 1, 0, -1, 0;
  const auto id = GroupElement::identity(2, 2);
  EXPECT_EQ(act_on_configuration(id, c), c);
  Matrix flipped(2, 2);
  flipped << -1, 0, 1, 0;
  EXPECT_EQ(act_on_configuration(element(-Matrix::Identity(2, 2), {0, 1}), c), flipped);
  Matrix c2(2, 2);
  c2 << 1, 0, 0, 1;
  Matrix swapped(2, 2);
  swapped << 0, 1, 1, 0;
  EXPECT_EQ(act_on_configuration(element(Matrix::Identity(2, 2), {1, 0}), c2), swapped);
  try {
    act_on_configuration(id, Matrix::Zero(3, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(CoefficientAction, HalfShiftNegatesFirstMode) {
  auto g = trivial_group(2, 2);
  const auto spec = unit_problem(2, g, {4, 4, 8, 1e-6});
  GroupElement shift = GroupElement::identity(2, 2);
  shift.tau = TimeAction::rotation(1, 2);
  const Matrix L = coefficient_action(shift, spec).dense();
  const int nd = 4;
  EXPECT_TRUE(L.block(nd, nd, 2 * nd, 2 * nd).isApprox(-Matrix::Identity(2 * nd, 2 * nd), 1e-14));
  EXPECT_TRUE(L.block(3 * nd, 3 * nd, 2 * nd, 2 * nd).isApprox(Matrix::Identity(2 * nd, 2 * nd), 1e-14));
  EXPECT_TRUE(coefficient_action(GroupElement::identity(2, 2), spec).dense().isIdentity(0));
}

TEST(CoefficientAction, MatchesLoopAction) {
  const auto g = eight_group();
  const auto spec = unit_problem(3, g, {5, 4, 8, 1e-6});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  TrigLoop loop(3, 2, 5, g.period());
  for (auto& v : loop.coefficients()) v = N(rng);
  for (const auto& e : g.elements()) {
    const TrigLoop moved(3, 2, 5, g.period(), coefficient_action(e, spec).apply(loop.coefficients()));
    for (double t : {0.0, 0.3, 2.2, 9.0}) EXPECT_LT((moved.position(t) - act_on_loop_at(e, loop, t)).norm(), 1e-12);
  }
}

TEST(Projector, IdempotentSymmetricInvariant) {
  for (const auto& g : {half_turn_group(3), eight_group(), trivial_group(3, 2)}) {
    const auto spec = unit_problem(3, g, {6, 4, 8, 1e-6});
    const EquivariantBasis B(g, spec);
    const Matrix P = B.projector();
    EXPECT_LT((P * P - P).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((P - P.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    for (const auto& e : g.elements()) EXPECT_LT((P * coefficient_action(e, spec).dense() - P).cwiseAbs().maxCoeff(), 1e-10);
    const Matrix Bd = B.dense();
    EXPECT_LT((Bd.transpose() * Bd - Matrix::Identity(B.rank(), B.rank())).cwiseAbs().maxCoeff(), 1e-12);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> N;
    for (int s = 0; s < 100; ++s) {
      Vector v(P.rows());
      for (auto& x : v) x = N(rng);
      EXPECT_LT((B.project(B.project(v)) - B.project(v)).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Projector, TrivialGroupWithoutCenterOfMass) {
  const auto g = trivial_group(2, 2);
  const auto spec = unit_problem(2, g, {3, 4, 8, 1e-6});
  const EquivariantBasis B(g, spec, false);
  EXPECT_EQ(B.rank(), B.coefficient_size());
  EXPECT_TRUE(B.projector().isIdentity(1e-12));
}

TEST(Projector, HalfTurnKillsConstantMode) {
  const auto g = half_turn_group(3);
  const auto spec = unit_problem(3, g, {6, 4, 8, 1e-6});
  const EquivariantBasis B(g, spec, false);
  EXPECT_LT(B.projector().topLeftCorner(6, 6).cwiseAbs().maxCoeff(), 1e-14);
  // Only odd harmonics survive a rho = -I half-period shift.
  EXPECT_EQ(B.rank(), 3 * 2 * 6);
}

TEST(Equivariance, ResidualOfProjectedAndPerturbedLoops) {
  const auto g = eight_group();
  const auto spec = unit_problem(3, g, {8, 4, 8, 1e-6});
  const EquivariantBasis B(g, spec);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  Vector z(B.rank());
  for (auto& v : z) v = N(rng);
  TrigLoop loop(3, 2, 8, g.period(), B.to_coefficients(z));
  EXPECT_LT(check_equivariance(loop, g), 1e-10);
  loop.coefficients()[spec.config_size() + 1] += 0.1;
  EXPECT_GT(check_equivariance(loop, g), 1e-3);
  EXPECT_EQ(check_equivariance(loop, trivial_group(3, 2)), 0.0);
}

TEST(Unfold, TrivialGroupRoundTrip) {
  const auto g = trivial_group(2, 2);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N;
  FundamentalPath p(2, 2, 6);
  for (auto& v : p.coefficients()) v = N(rng);
  p.x1() = p.x0();  // pi-periodic extension must be continuous
  const auto u = unfold(p, g, 64);
  // A pi-periodic trig loop of order 64 reproduces the path only approximately
  // at the kink; compare on the interior where the fit is spectrally accurate.
  double err = 0.0;
  for (double t : {0.4, 1.0, 1.6, 2.5}) err = std::max(err, (u.loop.position(t) - p.position(t)).norm());
  EXPECT_LT(err, 1e-2);
}

TEST(Unfold, LagrangeUnfoldsToCircle) {
  const auto g = half_turn_group(3);
  const TrigLoop circ = lagrange_loop(1);
  const FundamentalPath p = restrict_to_fundamental(circ, 4096);
  const auto u = unfold(p, g, 1);
  EXPECT_LT(check_equivariance(u.loop, g), 1e-9);
  EXPECT_LT((u.loop.coefficients() - circ.coefficients()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Unfold, RestrictRoundTripOnEquivariantLoops) {
  for (const auto& g : {half_turn_group(3), eight_group()}) {
    const auto spec = unit_problem(3, g, {6, 4, 8, 1e-6});
    const EquivariantBasis B(g, spec);
    for (int seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(static_cast<unsigned>(seed));
      std::normal_distribution<double> N;
      Vector z(B.rank());
      for (auto& v : z) v = N(rng);
      const TrigLoop loop(3, 2, 6, g.period(), B.to_coefficients(z));
      const auto u = unfold(restrict_to_fundamental(loop, 4096), g, 6);
      EXPECT_LT(check_equivariance(u.loop, g), 1e-8);
      EXPECT_LT((u.loop.coefficients() - loop.coefficients()).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(Unfold, DiscontinuousPathRejected) {
  const auto g = half_turn_group(2);
  FundamentalPath p(2, 2, 2);
  p.x0() << 1, 0, -1, 0;
  p.x1() << 0, 1, 0, -2;
  try {
    unfold(p, g, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DiscontinuousUnfold);
  }
}
