#pragma once

#include <random>

#include "equistab/action.hpp"
#include "equistab/io.hpp"

namespace testing_support {

using namespace equistab;

inline GroupElement element(Matrix rho, Permutation sigma, TimeAction tau = {}, std::string name = "") {
  return {std::move(rho), std::move(sigma), tau, std::move(name)};
}

inline Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d[i++] = x;
  return d.asDiagonal();
}

/// Fig. 1 / Fig. 2 group: r with rho = -I2, half-period shift.
inline SymmetryGroup half_turn_group(int n) {
  std::vector<GroupElement> g{element(-Matrix::Identity(2, 2), identity_permutation(n), {}, "r")};
  presets::cyclic(g, 2);
  return build_group(g, n, 2);
}

/// Figure-eight group: r = (I, (1 2 3)), s = (-I, (2 3)), dihedral of order 6.
inline SymmetryGroup eight_group() {
  std::vector<GroupElement> g{element(Matrix::Identity(2, 2), {1, 2, 0}, {}, "r"),
                              element(-Matrix::Identity(2, 2), {0, 2, 1}, {}, "s")};
  presets::dihedral(g, 6);
  return build_group(g, 3, 2);
}

inline SymmetryGroup trivial_group(int n, int d) { return build_group({}, n, d); }

inline ProblemSpec unit_problem(int n, SymmetryGroup g, Discretization disc = {}) {
  return ProblemSpec(std::vector<double>(static_cast<std::size_t>(n), 1.0), g.dim(), std::move(g), disc);
}

/// Lagrange relative equilibrium, unit masses, side 3^(1/3), omega = 2 pi / T.
inline TrigLoop lagrange_loop(int K, double period = 2.0 * M_PI) {
  TrigLoop loop(3, 2, K, period);
  const double s = std::cbrt(3.0);
  const double r = s / std::sqrt(3.0) * std::pow(2.0 * M_PI / period, -2.0 / 3.0);
  for (int i = 0; i < 3; ++i) {
    const double phi = 2.0 * M_PI * i / 3.0;
    loop.mode_block(1)[i * 2 + 0] = r * std::cos(phi);
    loop.mode_block(1)[i * 2 + 1] = r * std::sin(phi);
    loop.mode_block(2)[i * 2 + 0] = -r * std::sin(phi);
    loop.mode_block(2)[i * 2 + 1] = r * std::cos(phi);
  }
  return loop;
}

/// Euler collinear relative equilibrium: bodies at -a, 0, a with a^3 = 5/4.
inline TrigLoop euler_loop(int K) {
  TrigLoop loop(3, 2, K, 2.0 * M_PI);
  const double a = std::cbrt(1.25);
  const double pos[3] = {-a, 0.0, a};
  for (int i = 0; i < 3; ++i) {
    loop.mode_block(1)[i * 2 + 0] = pos[i];
    loop.mode_block(2)[i * 2 + 1] = pos[i];
  }
  return loop;
}

/// Circular Kepler two-body orbit, unit masses, T = 2 pi (omega^2 r^3 = 2).
inline TrigLoop kepler_loop(int K) {
  TrigLoop loop(2, 2, K, 2.0 * M_PI);
  const double r = std::cbrt(2.0);
  const double half = r / 2.0;
  loop.mode_block(1) << half, 0.0, -half, 0.0;
  loop.mode_block(2) << 0.0, half, 0.0, -half;
  return loop;
}

inline Vector random_configuration(std::mt19937_64& rng, int n, int d, double min_sep = 0.3) {
  std::normal_distribution<double> N(0.0, 1.0);
  for (;;) {
    Vector x(n * d);
    for (auto& v : x) v = N(rng);
    if (min_pairwise_distance(x, n, d) > min_sep) return x;
  }
}

inline std::string fixture_path(const std::string& name) { return std::string(EQUISTAB_FIXTURES) + "/" + name; }

inline OrbitFile load_fixture(const std::string& name) { return *parse_input(read_text(fixture_path(name))).orbit; }

}  // namespace testing_support
