#pragma once

// Newtonian potential U(x) = sum_{j<i} m_i m_j / |x_i - x_j| and the
// first-order flow  x' = M^-1 y,  y' = grad U(x).
//
// Configurations are flat vectors of length n*d with body i in entries
// [i*d, i*d + d).

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "equistab/problem.hpp"

namespace equistab {

inline Vector flatten(const Matrix& config) {
  Vector v(config.size());
  for (int i = 0; i < config.rows(); ++i)
    for (int c = 0; c < config.cols(); ++c) v[i * config.cols() + c] = config(i, c);
  return v;
}

inline Matrix unflatten(const Vector& v, int n, int d) {
  Matrix m(n, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) m(i, c) = v[i * d + c];
  return m;
}

inline double min_pairwise_distance(const double* x, int n, int d) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double r2 = 0.0;
      for (int c = 0; c < d; ++c) {
        const double dx = x[i * d + c] - x[j * d + c];
        r2 += dx * dx;
      }
      best = std::min(best, std::sqrt(r2));
    }
  return best;
}

inline double min_pairwise_distance(const Vector& x, int n, int d) { return min_pairwise_distance(x.data(), n, d); }

namespace detail {

inline void check_size(const Vector& x, const ProblemSpec& spec) {
  if (x.size() != spec.config_size()) fail(ErrorCode::DimensionMismatch, "configuration size mismatch");
}

inline void check_collision(const double* x, const ProblemSpec& spec) {
  const double r = min_pairwise_distance(x, spec.bodies(), spec.dim());
  if (!(r >= spec.delta()))
    fail(ErrorCode::CollisionalConfiguration, "pairwise distance " + std::to_string(r) + " below guard");
}

}  // namespace detail

/// Potential and, optionally, its gradient and Hessian in one pass over
/// pairs. No collision check; callers guard.
inline double potential_terms(const double* x, const ProblemSpec& spec, double* grad, double* hess) {
  const int n = spec.bodies();
  const int d = spec.dim();
  const int N = n * d;
  if (grad) std::fill(grad, grad + N, 0.0);
  if (hess) std::fill(hess, hess + N * N, 0.0);
  double u = 0.0;
  double r[3];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      double r2 = 0.0;
      for (int c = 0; c < d; ++c) {
        r[c] = x[i * d + c] - x[j * d + c];
        r2 += r[c] * r[c];
      }
      const double mm = spec.mass(i) * spec.mass(j);
      const double inv = 1.0 / std::sqrt(r2);
      const double inv3 = inv * inv * inv;
      u += mm * inv;
      if (grad) {
        for (int c = 0; c < d; ++c) {
          const double f = mm * r[c] * inv3;
          grad[i * d + c] -= f;
          grad[j * d + c] += f;
        }
      }
      if (hess) {
        const double inv5 = inv3 * inv * inv;
        for (int a = 0; a < d; ++a) {
          for (int b = 0; b < d; ++b) {
            // d^2 (mm/|r|) / dr dr^T = mm (3 r r^T / |r|^5 - I / |r|^3)
            const double w = mm * (3.0 * r[a] * r[b] * inv5 - (a == b ? inv3 : 0.0));
            hess[(i * d + a) * N + (i * d + b)] += w;
            hess[(j * d + a) * N + (j * d + b)] += w;
            hess[(i * d + a) * N + (j * d + b)] -= w;
            hess[(j * d + a) * N + (i * d + b)] -= w;
          }
        }
      }
    }
  }
  return u;
}

inline double potential(const Vector& x, const ProblemSpec& spec) {
  detail::check_size(x, spec);
  detail::check_collision(x.data(), spec);
  return potential_terms(x.data(), spec, nullptr, nullptr);
}

inline Vector grad_potential(const Vector& x, const ProblemSpec& spec) {
  detail::check_size(x, spec);
  detail::check_collision(x.data(), spec);
  Vector g(x.size());
  potential_terms(x.data(), spec, g.data(), nullptr);
  return g;
}

inline Matrix hess_potential(const Vector& x, const ProblemSpec& spec) {
  detail::check_size(x, spec);
  detail::check_collision(x.data(), spec);
  // Row-major fill into a column-major matrix is fine: the Hessian is symmetric.
  Matrix h(x.size(), x.size());
  potential_terms(x.data(), spec, nullptr, h.data());
  return h;
}

inline double potential(const Matrix& c, const ProblemSpec& spec) { return potential(flatten(c), spec); }
inline Matrix grad_potential(const Matrix& c, const ProblemSpec& spec) {
  return unflatten(grad_potential(flatten(c), spec), spec.bodies(), spec.dim());
}

/// Diagonal of M^-1: 1/m_i repeated d times per body.
inline Vector inverse_mass_diagonal(const ProblemSpec& spec) {
  Vector v(spec.config_size());
  for (int i = 0; i < spec.bodies(); ++i)
    for (int c = 0; c < spec.dim(); ++c) v[i * spec.dim() + c] = 1.0 / spec.mass(i);
  return v;
}

/// Positions x and momenta y = M x'.
struct PhaseState {
  Vector x;
  Vector y;
};

inline PhaseState vector_field(const PhaseState& s, const ProblemSpec& spec) {
  return {inverse_mass_diagonal(spec).cwiseProduct(s.y), grad_potential(s.x, spec)};
}

inline double hamiltonian(const PhaseState& s, const ProblemSpec& spec) {
  return 0.5 * s.y.dot(inverse_mass_diagonal(spec).cwiseProduct(s.y)) - potential(s.x, spec);
}

/// A(x) = [[0, M^-1], [hess U(x), 0]].
inline Matrix linearization_matrix(const Vector& x, const ProblemSpec& spec) {
  const int N = spec.config_size();
  Matrix a = Matrix::Zero(2 * N, 2 * N);
  a.topRightCorner(N, N) = inverse_mass_diagonal(spec).asDiagonal();
  a.bottomLeftCorner(N, N) = hess_potential(x, spec);
  return a;
}

/// Fixed-step RK4 for the nonlinear flow over [0, duration].
inline PhaseState integrate_flow(PhaseState s, const ProblemSpec& spec, double duration, int steps) {
  const double h = duration / steps;
  auto add = [](const PhaseState& a, const PhaseState& k, double w) { return PhaseState{a.x + w * k.x, a.y + w * k.y}; };
  for (int i = 0; i < steps; ++i) {
    const PhaseState k1 = vector_field(s, spec);
    const PhaseState k2 = vector_field(add(s, k1, h / 2), spec);
    const PhaseState k3 = vector_field(add(s, k2, h / 2), spec);
    const PhaseState k4 = vector_field(add(s, k3, h), spec);
    s.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    s.y += h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
  }
  return s;
}

}  // namespace equistab
