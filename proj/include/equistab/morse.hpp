#pragma once

// Discrete Morse indices: negative-eigenvalue counts of the action Hessian,
// on the equivariant subspace (fundamental domain) and on the full-period
// point grid without symmetry constraints.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <optional>
#include <vector>

#include "equistab/action.hpp"

namespace equistab {

enum class MorseDomain { fundamental, period };

inline const char* to_string(MorseDomain d) { return d == MorseDomain::fundamental ? "fundamental" : "period"; }

struct NegativeCount {
  int index = 0;
  Vector eigenvalues;  // ascending
  std::optional<double> max_negative;
};

struct MorseResult {
  MorseDomain domain = MorseDomain::fundamental;
  int index = 0;
  Vector eigenvalues;  // ascending; for the inertia path only the negative ones
  std::optional<double> max_negative;
  int near_zero_count = 0;
  double eps_zero = 0.0;
  double eps_relative = 1e-8;
  double max_abs_eigenvalue = 0.0;
  int grid = 0;             // period domain: grid size M
  double refined_residual = 0.0;  // period domain: f1 gradient norm after refinement
  bool dense = true;
};

/// Symmetric eigen-decomposition and count of eigenvalues below -eps_zero.
inline NegativeCount count_negative(const Matrix& h, double eps_zero) {
  if (h.rows() != h.cols()) fail(ErrorCode::DimensionMismatch, "Hessian must be square");
  const double scale = h.cwiseAbs().maxCoeff();
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1e-300))
    fail(ErrorCode::NotSymmetric, "matrix is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.transpose()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "symmetric eigen-decomposition failed");
  NegativeCount out;
  out.eigenvalues = es.eigenvalues();
  for (double l : out.eigenvalues)
    if (l < -eps_zero) {
      ++out.index;
      out.max_negative = l;
    }
  return out;
}

namespace detail {

/// Fill index, extremes and near-zero count from a full ascending spectrum,
/// with eps_zero = eps_relative * max|lambda|.
inline void classify_spectrum(MorseResult& r, const Matrix& h) {
  NegativeCount c = count_negative(h, 0.0);
  r.max_abs_eigenvalue = c.eigenvalues.size() ? c.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  r.eps_zero = r.eps_relative * r.max_abs_eigenvalue;
  r.eigenvalues = std::move(c.eigenvalues);
  r.index = 0;
  r.max_negative.reset();
  r.near_zero_count = 0;
  for (double l : r.eigenvalues) {
    if (l < -r.eps_zero) {
      ++r.index;
      r.max_negative = l;
    } else if (l <= r.eps_zero) {
      ++r.near_zero_count;
    }
  }
}

}  // namespace detail

/// Number of negative pivots of the LDL^T factorization of (H - shift I);
/// by Sylvester's law this is the number of eigenvalues below shift.
inline int inertia_below(const Eigen::SparseMatrix<double>& h, double shift) {
  Eigen::SparseMatrix<double> a = h;
  for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) -= shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "LDL^T factorization failed");
  int neg = 0;
  for (double v : ldlt.vectorD())
    if (v < 0.0) ++neg;
  return neg;
}

/// Fundamental-domain index at a critical point of the reduced action.
inline MorseResult morse_fundamental(const LoopAction& A, const Vector& z, double eps_relative = 1e-8, double critical_tol = 1e-6) {
  const double g = A.gradient(z).norm();
  if (g > critical_tol) fail(ErrorCode::NotCritical, "reduced gradient norm " + std::to_string(g) + " exceeds " + std::to_string(critical_tol));
  MorseResult r;
  r.domain = MorseDomain::fundamental;
  r.eps_relative = eps_relative;
  detail::classify_spectrum(r, A.hessian(z));
  return r;
}

namespace detail {

/// Newton iteration for a critical point of f1 inside the equivariant grid
/// subspace; near-singular directions (continuous symmetries) are dropped.
inline SampledLoop refine_point_critical(const PointAction& P, SampledLoop y, const Eigen::SparseMatrix<double>& S, double& residual) {
  const Eigen::SparseMatrix<double> St = S.transpose();
  for (int it = 0; it < 30; ++it) {
    const Vector g = St * P.gradient(y);
    residual = g.norm();
    if (residual < 1e-12 * std::max(1.0, y.values().cwiseAbs().maxCoeff())) break;
    const Matrix h = Matrix(St * P.hessian(y) * S);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Vector& mu = es.eigenvalues();
    const double cut = 1e-10 * mu.cwiseAbs().maxCoeff();
    Vector gv = es.eigenvectors().transpose() * g;
    for (Eigen::Index i = 0; i < mu.size(); ++i) gv[i] = std::abs(mu[i]) > cut ? gv[i] / mu[i] : 0.0;
    const Vector step = S * (es.eigenvectors() * gv);
    y.values() -= step;
    if (step.norm() < 1e-15 * y.values().norm()) {
      residual = (St * P.gradient(y)).norm();
      break;
    }
  }
  return y;
}

/// Orthonormal complement of the d uniform translations of an M-node grid.
inline Matrix translation_complement(int total, int d) {
  Matrix w = Matrix::Zero(total, d);
  for (int r = 0; r < total; ++r) w(r, r % d) = 1.0;
  w /= std::sqrt(static_cast<double>(total / d));
  const Eigen::HouseholderQR<Matrix> qr(w);
  const Matrix q = qr.householderQ();
  return q.rightCols(total - d);
}

/// max |eigenvalue| from the two spectrum ends, each located by bisection on
/// the inertia count inside the Gershgorin interval.
inline double spectral_radius(const Eigen::SparseMatrix<double>& h) {
  double g = 0.0;
  for (Eigen::Index c = 0; c < h.outerSize(); ++c) {
    double col = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(h, c); it; ++it) col += std::abs(it.value());
    g = std::max(g, col);
  }
  if (g == 0.0) return 0.0;
  const int n = static_cast<int>(h.rows());
  auto bisect = [&](int target) {  // smallest s with inertia_below(h, s) >= target
    double lo = -1.01 * g, hi = 1.01 * g;
    while (hi - lo > 1e-13 * g) {
      const double mid = 0.5 * (lo + hi);
      (inertia_below(h, mid) >= target ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  return std::max(std::abs(bisect(1)), std::abs(bisect(n)));
}

}  // namespace detail

/// Full-period index of f1 on an M-node grid. The sampled loop is first
/// refined to an exact critical point of f1 (within the equivariant grid
/// subspace), then the Hessian is counted with the d translations removed.
/// Grids above dense_limit unknowns are counted by LDL^T inertia.
inline MorseResult morse_period(const TrigLoop& loop, const ProblemSpec& spec, int M, double eps_relative = 1e-8,
                                double residual_tol = 1e-3, int dense_limit = 1600) {
  const int l = spec.quotient_order();
  M = (M + l - 1) / l * l;
  const PointAction P(spec);
  SampledLoop y = SampledLoop::sample(loop, M);
  const double el = euler_lagrange_residual(y, spec);
  if (el > residual_tol) fail(ErrorCode::NotCritical, "pointwise Euler-Lagrange residual " + std::to_string(el) + " exceeds " + std::to_string(residual_tol));

  MorseResult r;
  r.domain = MorseDomain::period;
  r.eps_relative = eps_relative;
  r.grid = M;
  y = detail::refine_point_critical(P, y, grid_equivariant_basis(spec.group(), M), r.refined_residual);

  const Eigen::SparseMatrix<double> h = P.hessian(y);
  const int total = static_cast<int>(h.rows());
  const int d = spec.dim();
  if (total - d <= dense_limit) {
    const Matrix q = detail::translation_complement(total, d);
    const Matrix hr = q.transpose() * (h * q);
    detail::classify_spectrum(r, 0.5 * (hr + hr.transpose()));
    return r;
  }

  // Inertia path: the translations are exact zero modes of H, so they fall
  // inside [-eps, eps] and are subtracted from the near-zero count.
  r.dense = false;
  r.max_abs_eigenvalue = detail::spectral_radius(h);
  r.eps_zero = eps_relative * r.max_abs_eigenvalue;
  r.index = inertia_below(h, -r.eps_zero);
  r.near_zero_count = std::max(0, inertia_below(h, r.eps_zero) - r.index - d);
  std::vector<double> negatives;
  for (int j = 0; j < r.index; ++j) {
    // j-th smallest eigenvalue by bisection on the inertia count.
    double lo = -1.01 * r.max_abs_eigenvalue, hi = -r.eps_zero;
    for (int it = 0; it < 80 && hi - lo > 1e-12 * r.max_abs_eigenvalue; ++it) {
      const double mid = 0.5 * (lo + hi);
      (inertia_below(h, mid) > j ? hi : lo) = mid;
    }
    negatives.push_back(0.5 * (lo + hi));
  }
  r.eigenvalues = Eigen::Map<Vector>(negatives.data(), static_cast<Eigen::Index>(negatives.size()));
  if (!negatives.empty()) r.max_negative = negatives.back();
  return r;
}

}  // namespace equistab
