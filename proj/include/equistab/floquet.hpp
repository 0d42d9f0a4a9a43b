#pragma once

// Monodromy matrix X(T) of the variational equation X' = A(t) X, X(0) = I,
// along a periodic orbit, and its Floquet multipliers.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "equistab/action.hpp"

namespace equistab {

using Complex = std::complex<double>;

struct OrbitPoint {
  Vector x;
  Vector v;
};

inline OrbitPoint evaluate_orbit(const TrigLoop& loop, double t) { return {loop.position(t), loop.velocity(t)}; }

enum class MonodromyMode { analytic, shooting };

struct MonodromyOptions {
  MonodromyMode mode = MonodromyMode::analytic;
  int steps = 8192;
  bool potential_off = false;  // test hook: integrate with hess U = 0
};

struct MonodromyResult {
  Matrix monodromy;          // X(T) / 2^scale_exponent
  int scale_exponent = 0;    // nonzero only when the solution was rescaled
  std::vector<Complex> multipliers;
  double max_modulus = 0.0;
  double log10_max_modulus = 0.0;
  double det_residual = 0.0;
  double symplectic_residual = 0.0;
  double pairing_residual = 0.0;
  MonodromyMode mode = MonodromyMode::analytic;
  int steps = 0;
  bool rescaled = false;
};

namespace detail {

inline Matrix variational_matrix(const Vector& x, const Vector& minv, const ProblemSpec& spec, bool potential_off) {
  const int N = spec.config_size();
  require_separation(min_pairwise_distance(x, spec.bodies(), spec.dim()), spec);
  Matrix a = Matrix::Zero(2 * N, 2 * N);
  a.topRightCorner(N, N) = minv.asDiagonal();
  if (!potential_off) {
    Matrix h(N, N);
    potential_terms(x.data(), spec, nullptr, h.data());
    a.bottomLeftCorner(N, N) = h;
  }
  return a;
}

/// log2 |det X|, computed through LU to survive large entries.
template <class Derived>
double log2_abs_det(const Eigen::MatrixBase<Derived>& x) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::PartialPivLU<M> lu(x);
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) s += static_cast<double>(std::log2(std::abs(lu.matrixLU()(i, i))));
  return s;
}

}  // namespace detail

/// Standard symplectic form for states ordered (x, y).
inline Matrix symplectic_form(int N) {
  Matrix j = Matrix::Zero(2 * N, 2 * N);
  j.topRightCorner(N, N).setIdentity();
  j.bottomLeftCorner(N, N) = -Matrix::Identity(N, N);
  return j;
}

/// Eigenvalues of a real matrix, sorted by non-increasing modulus with
/// conjugate pairs made exact.
inline std::vector<Complex> multipliers(const Matrix& m) {
  if (!m.allFinite()) fail(ErrorCode::EigenFailure, "monodromy has non-finite entries");
  const Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "nonsymmetric eigen-decomposition failed");
  std::vector<Complex> ev(es.eigenvalues().begin(), es.eigenvalues().end());
  std::vector<bool> used(ev.size(), false);
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (used[i] || ev[i].imag() == 0.0) continue;
    std::size_t best = i;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ev.size(); ++j)
      if (j != i && !used[j] && std::abs(ev[j] - std::conj(ev[i])) < dist) {
        dist = std::abs(ev[j] - std::conj(ev[i]));
        best = j;
      }
    if (best == i) continue;
    const Complex mean = 0.5 * (ev[i] + std::conj(ev[best]));
    ev[i] = mean;
    ev[best] = std::conj(mean);
    used[i] = used[best] = true;
  }
  std::stable_sort(ev.begin(), ev.end(), [](const Complex& a, const Complex& b) { return std::abs(a) > std::abs(b); });
  return ev;
}

/// Hausdorff distance between the multiplier set and its image under 1 / conj.
inline double pairing_residual(const std::vector<Complex>& ev) {
  auto directed = [&](bool invert_first) {
    double worst = 0.0;
    for (const auto& a : ev) {
      const Complex p = invert_first ? 1.0 / std::conj(a) : a;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& b : ev) best = std::min(best, std::abs(p - (invert_first ? b : 1.0 / std::conj(b))));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(true), directed(false));
}

/// Principal solution over one period by fixed-step RK4. Analytic mode reads
/// the orbit from the trig series; shooting mode integrates it jointly from
/// (x(0), M x'(0)). Entries above 1e150 trigger rescaling by powers of two.
inline MonodromyResult monodromy(const TrigLoop& loop, const ProblemSpec& spec, const MonodromyOptions& opts = {}) {
  const int N = spec.config_size();
  if (loop.block() != N) fail(ErrorCode::DimensionMismatch, "loop does not match problem dimensions");
  const double T = loop.period();
  const int steps = opts.steps;
  const double h = T / steps;
  const Vector minv = inverse_mass_diagonal(spec);

  // The principal solution is accumulated in extended precision: with
  // multipliers near 1e5 the double roundoff floor of det X(T) is about 1e-6.
  using Wide = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Wide X = Wide::Identity(2 * N, 2 * N);
  int exponent = 0;
  double det_res = 0.0;
  const int checkpoint = std::max(1, steps / 16);

  PhaseState s{loop.position(0.0), loop.velocity(0.0).cwiseQuotient(minv)};
  auto a_at = [&](const Vector& x) -> Wide { return detail::variational_matrix(x, minv, spec, opts.potential_off).cast<long double>(); };
  auto field = [&](const PhaseState& st) {
    Vector g(N);
    detail::require_separation(min_pairwise_distance(st.x, spec.bodies(), spec.dim()), spec);
    potential_terms(st.x.data(), spec, g.data(), nullptr);
    return PhaseState{minv.cwiseProduct(st.y), g};
  };

  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    Wide A1, A2, A3, A4;
    if (opts.mode == MonodromyMode::analytic) {
      A1 = a_at(loop.position(t));
      A2 = a_at(loop.position(t + h / 2));
      A3 = A2;
      A4 = a_at(loop.position(t + h));
    } else {
      const PhaseState k1 = field(s);
      const PhaseState s2{s.x + h / 2 * k1.x, s.y + h / 2 * k1.y};
      const PhaseState k2 = field(s2);
      const PhaseState s3{s.x + h / 2 * k2.x, s.y + h / 2 * k2.y};
      const PhaseState k3 = field(s3);
      const PhaseState s4{s.x + h * k3.x, s.y + h * k3.y};
      const PhaseState k4 = field(s4);
      A1 = a_at(s.x);
      A2 = a_at(s2.x);
      A3 = a_at(s3.x);
      A4 = a_at(s4.x);
      s.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
      s.y += h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
    }
    const long double hl = h;
    const Wide K1 = A1 * X;
    const Wide K2 = A2 * (X + hl / 2 * K1);
    const Wide K3 = A3 * (X + hl / 2 * K2);
    const Wide K4 = A4 * (X + hl * K3);
    X += hl / 6 * (K1 + 2 * K2 + 2 * K3 + K4);
    if (!X.allFinite()) fail(ErrorCode::NonFiniteIntegration, "variational solution became non-finite");
    const double big = static_cast<double>(X.cwiseAbs().maxCoeff());
    if (big > 1e150) {
      const int e = static_cast<int>(std::floor(std::log2(big)));
      X = std::ldexp(1.0L, -e) * X;
      exponent += e;
    }
    if ((k + 1) % checkpoint == 0 || k + 1 == steps) {
      const double l2 = detail::log2_abs_det(X) + 2.0 * N * exponent;
      det_res = std::max(det_res, std::abs(std::exp2(l2) - 1.0));
    }
  }

  MonodromyResult r;
  r.monodromy = X.cast<double>();
  r.scale_exponent = exponent;
  r.rescaled = exponent != 0;
  r.mode = opts.mode;
  r.steps = steps;
  r.det_residual = det_res;
  const Matrix J = symplectic_form(N);
  if (exponent == 0) {
    r.symplectic_residual = (r.monodromy.transpose() * J * r.monodromy - J).cwiseAbs().rowwise().sum().maxCoeff();
  } else {
    r.symplectic_residual = std::numeric_limits<double>::infinity();
  }
  std::vector<Complex> ev = multipliers(r.monodromy);
  const double log10_top = std::log10(std::abs(ev.front())) + exponent * std::log10(2.0);
  const double scale = std::ldexp(1.0, exponent);
  for (auto& v : ev) v *= scale;
  r.multipliers = ev;
  r.max_modulus = std::abs(ev.front());
  r.log10_max_modulus = log10_top;
  r.pairing_residual = pairing_residual(ev);
  return r;
}

struct StabilityVerdict {
  bool stable = true;
  double max_modulus = 0.0;
  double margin = 0.0;  // (1 + tol) - max_modulus; negative when unstable
};

inline StabilityVerdict stability_verdict(double max_modulus, double tol = 0.05) {
  return {max_modulus <= 1.0 + tol, max_modulus, 1.0 + tol - max_modulus};
}

inline StabilityVerdict stability_verdict(const MonodromyResult& m, double tol = 0.05) { return stability_verdict(m.max_modulus, tol); }

}  // namespace equistab
