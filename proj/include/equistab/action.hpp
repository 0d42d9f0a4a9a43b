#pragma once

// Lagrangian action A = int (K + U) dt in three discretizations:
//   * TrigLoop over the full period (kinetic part in closed form, potential by
//     the periodic trapezoid rule on Q = 4M nodes), also in reduced coordinates;
//   * FundamentalPath on [0, pi] (f2);
//   * SampledLoop with forward differences (f1).

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <limits>
#include <vector>

#include "equistab/equivariance.hpp"

namespace equistab {

namespace detail {

inline void require_separation(double r, const ProblemSpec& spec) {
  if (!(r >= spec.delta())) fail(ErrorCode::CollisionalPath, "path comes within " + std::to_string(r) + " of a collision");
}

}  // namespace detail

/// Action of trigonometric loops, in full coefficients or in reduced
/// coordinates z (coefficients = B z). Reduced quantities use the
/// fundamental-domain convention A / l.
class LoopAction {
 public:
  LoopAction(const ProblemSpec& spec, bool zero_center_of_mass = true)
      : spec_(spec), basis_(spec.group(), spec, zero_center_of_mass), quad_(4 * spec.disc().M) {
    const int K = spec.disc().K;
    nd_ = spec.config_size();
    period_ = spec.period();
    cos_.resize(quad_);
    sin_.resize(quad_);
    for (int p = 0; p < quad_; ++p) {
      cos_[static_cast<std::size_t>(p)] = std::cos(2.0 * M_PI * p / quad_);
      sin_[static_cast<std::size_t>(p)] = std::sin(2.0 * M_PI * p / quad_);
    }
    kinetic_diag_ = Vector::Zero(basis_.coefficient_size());
    for (int k = 1; k <= K; ++k) {
      const double om = 2.0 * M_PI * k / period_;
      for (int m : {TrigLoop::cos_mode(k), TrigLoop::sin_mode(k)})
        for (int i = 0; i < spec.bodies(); ++i)
          for (int c = 0; c < spec.dim(); ++c)
            kinetic_diag_[(m * spec.bodies() + i) * spec.dim() + c] = 0.5 * period_ * om * om * spec.mass(i);
    }
  }

  const ProblemSpec& spec() const noexcept { return spec_; }
  const EquivariantBasis& basis() const noexcept { return basis_; }
  int quadrature_nodes() const noexcept { return quad_; }
  int order() const noexcept { return spec_.disc().K; }
  Eigen::Index reduced_size() const noexcept { return basis_.rank(); }
  double scale() const noexcept { return 1.0 / spec_.quotient_order(); }

  TrigLoop loop(const Vector& z) const { return TrigLoop(spec_.bodies(), spec_.dim(), order(), period_, basis_.to_coefficients(z)); }
  Vector reduce(const TrigLoop& loop) const { return basis_.to_reduced(loop.coefficients()); }

  /// Configurations at the quadrature nodes, nd x Q.
  Matrix node_positions(const Vector& coef) const {
    const int K = order();
    Matrix x(nd_, quad_);
    for (int q = 0; q < quad_; ++q) {
      Vector v = coef.head(nd_);
      for (int k = 1; k <= K; ++k) {
        const auto p = static_cast<std::size_t>((static_cast<long>(k) * q) % quad_);
        v += cos_[p] * coef.segment(TrigLoop::cos_mode(k) * nd_, nd_) + sin_[p] * coef.segment(TrigLoop::sin_mode(k) * nd_, nd_);
      }
      x.col(q) = v;
    }
    return x;
  }

  double min_separation(const Vector& coef) const {
    const Matrix x = node_positions(coef);
    double r = std::numeric_limits<double>::infinity();
    for (int q = 0; q < quad_; ++q) r = std::min(r, min_pairwise_distance(x.col(q).data(), spec_.bodies(), spec_.dim()));
    return r;
  }

  // ---- full coefficients, full-period action --------------------------------

  double kinetic(const Vector& coef) const { return 0.5 * coef.dot(kinetic_diag_.cwiseProduct(coef)); }

  double value_full(const Vector& coef) const {
    const Matrix x = node_positions(coef);
    double u = 0.0;
    for (int q = 0; q < quad_; ++q) {
      detail::require_separation(min_pairwise_distance(x.col(q).data(), spec_.bodies(), spec_.dim()), spec_);
      u += potential_terms(x.col(q).data(), spec_, nullptr, nullptr);
    }
    return kinetic(coef) + u * period_ / quad_;
  }

  Vector gradient_full(const Vector& coef) const {
    const int K = order();
    const Matrix x = node_positions(coef);
    const double w = period_ / quad_;
    Vector g = kinetic_diag_.cwiseProduct(coef);
    Vector gq(nd_);
    for (int q = 0; q < quad_; ++q) {
      detail::require_separation(min_pairwise_distance(x.col(q).data(), spec_.bodies(), spec_.dim()), spec_);
      potential_terms(x.col(q).data(), spec_, gq.data(), nullptr);
      g.head(nd_) += w * gq;
      for (int k = 1; k <= K; ++k) {
        const auto p = static_cast<std::size_t>((static_cast<long>(k) * q) % quad_);
        g.segment(TrigLoop::cos_mode(k) * nd_, nd_) += (w * cos_[p]) * gq;
        g.segment(TrigLoop::sin_mode(k) * nd_, nd_) += (w * sin_[p]) * gq;
      }
    }
    return g;
  }

  /// Dense full-coefficient Hessian (D x D).
  Matrix hessian_full(const Vector& coef) const {
    const Spectra s = hessian_spectra(coef);
    const int modes = 2 * order() + 1;
    Matrix h(modes * nd_, modes * nd_);
    for (int a = 0; a < modes; ++a)
      for (int b = 0; b < modes; ++b) h.block(a * nd_, b * nd_, nd_, nd_) = s.block(a, b);
    h.diagonal() += kinetic_diag_;
    return h;
  }

  // ---- reduced coordinates, fundamental-domain convention -------------------

  double value(const Vector& z) const { return scale() * value_full(basis_.to_coefficients(z)); }

  Vector gradient(const Vector& z) const { return scale() * basis_.to_reduced(gradient_full(basis_.to_coefficients(z))); }

  Matrix hessian(const Vector& z) const {
    const Vector coef = basis_.to_coefficients(z);
    const Spectra s = hessian_spectra(coef);
    const auto& blocks = basis_.blocks();
    const Eigen::Index r = basis_.rank();
    Matrix h = Matrix::Zero(r, r);
    for (const auto& bj : blocks) {
      if (bj.basis.cols() == 0) continue;
      for (const auto& bi : blocks) {
        if (bi.basis.cols() == 0 || bi.col > bj.col) continue;
        Matrix hb(bi.width * nd_, bj.width * nd_);
        for (int u = 0; u < bi.width; ++u)
          for (int v = 0; v < bj.width; ++v) hb.block(u * nd_, v * nd_, nd_, nd_) = s.block(bi.first_mode + u, bj.first_mode + v);
        if (bi.first_mode == bj.first_mode) {
          hb.diagonal() += kinetic_diag_.segment(bi.first_mode * nd_, bi.width * nd_);
        }
        h.block(bi.col, bj.col, bi.basis.cols(), bj.basis.cols()) = bi.basis.transpose() * hb * bj.basis;
      }
    }
    h = h.selfadjointView<Eigen::Upper>();
    return scale() * h;
  }

 private:
  /// Discrete cosine/sine sums of hess U along the quadrature grid,
  ///   C_j = w sum_q cos(2 pi j q / Q) H_q,  S_j = w sum_q sin(2 pi j q / Q) H_q,
  /// from which every mode-pair block follows by product-to-sum identities.
  struct Spectra {
    int nd;
    std::vector<Matrix> c;  // j = 0..2K
    std::vector<Matrix> s;

    const Matrix& C(int j) const { return c[static_cast<std::size_t>(std::abs(j))]; }
    Matrix S(int j) const { return j >= 0 ? s[static_cast<std::size_t>(j)] : Matrix(-s[static_cast<std::size_t>(-j)]); }

    /// Potential block between modes a and b.
    Matrix block(int ma, int mb) const {
      const int ka = (ma + 1) / 2;
      const int kb = (mb + 1) / 2;
      const bool ca = ma == 0 || ma % 2 == 1;  // cosine-type (constant counts as cos 0)
      const bool cb = mb == 0 || mb % 2 == 1;
      if (ca && cb) {
        if (ka == 0 && kb == 0) return C(0);
        if (ka == 0 || kb == 0) return C(ka + kb);
        return 0.5 * (C(ka - kb) + C(ka + kb));
      }
      if (ca && !cb) {  // cos(a) sin(b)
        if (ka == 0) return S(kb);
        return 0.5 * (S(ka + kb) - S(ka - kb));
      }
      if (!ca && cb) {  // sin(a) cos(b)
        if (kb == 0) return S(ka);
        return 0.5 * (S(ka + kb) + S(ka - kb));
      }
      return 0.5 * (C(ka - kb) - C(ka + kb));
    }
  };

  Spectra hessian_spectra(const Vector& coef) const {
    const int K = order();
    const Matrix x = node_positions(coef);
    const double w = period_ / quad_;
    Spectra sp;
    sp.nd = nd_;
    sp.c.assign(static_cast<std::size_t>(2 * K + 1), Matrix::Zero(nd_, nd_));
    sp.s.assign(static_cast<std::size_t>(2 * K + 1), Matrix::Zero(nd_, nd_));
    Matrix hq(nd_, nd_);
    for (int q = 0; q < quad_; ++q) {
      detail::require_separation(min_pairwise_distance(x.col(q).data(), spec_.bodies(), spec_.dim()), spec_);
      potential_terms(x.col(q).data(), spec_, nullptr, hq.data());
      for (int j = 0; j <= 2 * K; ++j) {
        const auto p = static_cast<std::size_t>((static_cast<long>(j) * q) % quad_);
        sp.c[static_cast<std::size_t>(j)] += (w * cos_[p]) * hq;
        if (j > 0) sp.s[static_cast<std::size_t>(j)] += (w * sin_[p]) * hq;
      }
    }
    return sp;
  }

  ProblemSpec spec_;
  EquivariantBasis basis_;
  int quad_;
  int nd_ = 0;
  double period_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
  Vector kinetic_diag_;
};

/// Full-period action of a trigonometric loop.
inline double action_full(const TrigLoop& loop, const ProblemSpec& spec) {
  const ProblemSpec s = spec.with_disc({loop.order(), spec.disc().F, spec.disc().M, spec.delta()});
  return LoopAction(s, false).value_full(loop.coefficients());
}

// ---- fundamental-domain path (f2) -------------------------------------------

/// Fundamental-domain action and derivatives; quadrature on Q = 4M intervals
/// of [0, pi] with the composite trapezoid rule.
class PathAction {
 public:
  explicit PathAction(const ProblemSpec& spec) : spec_(spec), quad_(4 * spec.disc().M) {}

  int quadrature_intervals() const noexcept { return quad_; }

  double value(const FundamentalPath& path) const {
    double u = 0.0;
    for (int q = 0; q <= quad_; ++q) {
      const Vector x = path.position(node(q));
      detail::require_separation(min_pairwise_distance(x, spec_.bodies(), spec_.dim()), spec_);
      u += weight(q) * potential_terms(x.data(), spec_, nullptr, nullptr);
    }
    return kinetic(path) + u;
  }

  double kinetic(const FundamentalPath& path) const {
    const int d = spec_.dim();
    double k = 0.0;
    const Vector dx = path.x1() - path.x0();
    for (int i = 0; i < spec_.bodies(); ++i) {
      double s = dx.segment(i * d, d).squaredNorm() / M_PI;
      for (int m = 1; m <= path.sine_modes(); ++m) s += 0.5 * M_PI * m * m * path.sine(m).segment(i * d, d).squaredNorm();
      k += 0.5 * spec_.mass(i) * s;
    }
    return k;
  }

  Vector gradient(const FundamentalPath& path) const {
    const int nd = spec_.config_size();
    const int blocks = path.sine_modes() + 2;
    Vector g = kinetic_hessian(path.sine_modes()) * path.coefficients();
    Vector gq(nd);
    for (int q = 0; q <= quad_; ++q) {
      const double t = node(q);
      const Vector x = path.position(t);
      detail::require_separation(min_pairwise_distance(x, spec_.bodies(), spec_.dim()), spec_);
      potential_terms(x.data(), spec_, gq.data(), nullptr);
      for (int b = 0; b < blocks; ++b) g.segment(b * nd, nd) += (weight(q) * FundamentalPath::basis(b, t)) * gq;
    }
    return g;
  }

  Matrix hessian(const FundamentalPath& path) const {
    const int nd = spec_.config_size();
    const int blocks = path.sine_modes() + 2;
    Matrix h = kinetic_hessian(path.sine_modes());
    Matrix hq(nd, nd);
    Vector phi(blocks);
    for (int q = 0; q <= quad_; ++q) {
      const double t = node(q);
      const Vector x = path.position(t);
      detail::require_separation(min_pairwise_distance(x, spec_.bodies(), spec_.dim()), spec_);
      potential_terms(x.data(), spec_, nullptr, hq.data());
      for (int b = 0; b < blocks; ++b) phi[b] = FundamentalPath::basis(b, t);
      for (int a = 0; a < blocks; ++a)
        for (int b = 0; b <= a; ++b) h.block(a * nd, b * nd, nd, nd) += (weight(q) * phi[a] * phi[b]) * hq;
    }
    for (int a = 0; a < blocks; ++a)
      for (int b = 0; b < a; ++b) h.block(b * nd, a * nd, nd, nd) = h.block(a * nd, b * nd, nd, nd).transpose();
    return h;
  }

  /// Constant Hessian of the kinetic part.
  Matrix kinetic_hessian(int F) const {
    const int nd = spec_.config_size();
    const int d = spec_.dim();
    Matrix h = Matrix::Zero((F + 2) * nd, (F + 2) * nd);
    for (int i = 0; i < spec_.bodies(); ++i) {
      for (int c = 0; c < d; ++c) {
        const int r = i * d + c;
        const double m = spec_.mass(i);
        h(r, r) += m / M_PI;
        h(nd + r, nd + r) += m / M_PI;
        h(r, nd + r) -= m / M_PI;
        h(nd + r, r) -= m / M_PI;
        for (int k = 1; k <= F; ++k) h((1 + k) * nd + r, (1 + k) * nd + r) = 0.5 * M_PI * m * k * k;
      }
    }
    return h;
  }

 private:
  double node(int q) const { return M_PI * q / quad_; }
  double weight(int q) const { return (q == 0 || q == quad_ ? 0.5 : 1.0) * M_PI / quad_; }

  ProblemSpec spec_;
  int quad_;
};

inline double action_fundamental(const FundamentalPath& path, const ProblemSpec& spec) { return PathAction(spec).value(path); }

// ---- pointwise discretization (f1) ------------------------------------------

/// f1 = sum_k h [ 1/2 sum_i m_i |(y_i^{k+1} - y_i^k) / h|^2 + U(y^k) ], indices mod M.
class PointAction {
 public:
  explicit PointAction(const ProblemSpec& spec) : spec_(spec) {}

  double value(const SampledLoop& y, bool with_potential = true) const {
    const int M = y.nodes();
    const int d = spec_.dim();
    const double h = y.step();
    double f = 0.0;
    for (int k = 0; k < M; ++k) {
      const auto a = y.node(k);
      const auto b = y.node(k + 1);
      for (int i = 0; i < spec_.bodies(); ++i) f += 0.5 * spec_.mass(i) * (b.segment(i * d, d) - a.segment(i * d, d)).squaredNorm() / h;
      if (with_potential) {
        const Vector x = a;
        detail::require_separation(min_pairwise_distance(x, spec_.bodies(), d), spec_);
        f += h * potential_terms(x.data(), spec_, nullptr, nullptr);
      }
    }
    return f;
  }

  Vector gradient(const SampledLoop& y, bool with_potential = true) const {
    const int M = y.nodes();
    const int nd = spec_.config_size();
    const double h = y.step();
    const Vector minv = inverse_mass_diagonal(spec_);
    Vector g(M * nd);
    Vector gq(nd);
    for (int k = 0; k < M; ++k) {
      const Vector x = y.node(k);
      g.segment(k * nd, nd) = (2.0 * x - y.node(k + 1) - y.node(k - 1)).cwiseQuotient(minv) / h;
      if (with_potential) {
        detail::require_separation(min_pairwise_distance(x, spec_.bodies(), spec_.dim()), spec_);
        potential_terms(x.data(), spec_, gq.data(), nullptr);
        g.segment(k * nd, nd) += h * gq;
      }
    }
    return g;
  }

  /// Per-node blocks of the block-cyclic-tridiagonal Hessian: diagonal blocks
  /// D_k and the (uniform, diagonal) coupling -M/h between neighbours.
  struct CyclicBlocks {
    std::vector<Matrix> diagonal;
    Vector coupling;  // diagonal of the off-diagonal block, -m_i / h
  };

  CyclicBlocks hessian_blocks(const SampledLoop& y, bool with_potential = true) const {
    const int M = y.nodes();
    const int nd = spec_.config_size();
    const double h = y.step();
    const Vector minv = inverse_mass_diagonal(spec_);
    CyclicBlocks hb;
    hb.coupling = -minv.cwiseInverse() / h;
    Matrix hq(nd, nd);
    for (int k = 0; k < M; ++k) {
      Matrix dk = Matrix::Zero(nd, nd);
      dk.diagonal() = 2.0 * minv.cwiseInverse() / h;
      if (with_potential) {
        const Vector x = y.node(k);
        detail::require_separation(min_pairwise_distance(x, spec_.bodies(), spec_.dim()), spec_);
        potential_terms(x.data(), spec_, nullptr, hq.data());
        dk += h * hq;
      }
      hb.diagonal.push_back(std::move(dk));
    }
    return hb;
  }

  Eigen::SparseMatrix<double> hessian(const SampledLoop& y, bool with_potential = true) const {
    const CyclicBlocks hb = hessian_blocks(y, with_potential);
    const int M = y.nodes();
    const int nd = spec_.config_size();
    std::vector<Eigen::Triplet<double>> t;
    for (int k = 0; k < M; ++k) {
      for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b)
          if (hb.diagonal[static_cast<std::size_t>(k)](a, b) != 0.0) t.emplace_back(k * nd + a, k * nd + b, hb.diagonal[static_cast<std::size_t>(k)](a, b));
      const int next = (k + 1) % M;
      for (int a = 0; a < nd; ++a) {
        t.emplace_back(k * nd + a, next * nd + a, hb.coupling[a]);
        t.emplace_back(next * nd + a, k * nd + a, hb.coupling[a]);
      }
    }
    Eigen::SparseMatrix<double> h(M * nd, M * nd);
    h.setFromTriplets(t.begin(), t.end());
    return h;
  }

 private:
  ProblemSpec spec_;
};

inline double action_points(const SampledLoop& loop, const ProblemSpec& spec) { return PointAction(spec).value(loop); }

/// Max-norm discrete Euler-Lagrange residual of f1, relative to the force scale:
///   max |m (y^{k+1} - 2 y^k + y^{k-1}) / h^2 - dU/dx(y^k)| / max |dU/dx|.
inline double euler_lagrange_residual(const SampledLoop& y, const ProblemSpec& spec) {
  const Vector g = PointAction(spec).gradient(y);
  double force = 0.0;
  Vector gq(spec.config_size());
  for (int k = 0; k < y.nodes(); ++k) {
    const Vector x = y.node(k);
    potential_terms(x.data(), spec, gq.data(), nullptr);
    force = std::max(force, gq.cwiseAbs().maxCoeff());
  }
  return g.cwiseAbs().maxCoeff() / (y.step() * std::max(force, 1e-300));
}

}  // namespace equistab
