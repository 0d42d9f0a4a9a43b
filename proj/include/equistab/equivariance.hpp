#pragma once

// Group action on orbit representations: trigonometric coefficients, the
// fundamental-domain path, and uniform time grids.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "equistab/loops.hpp"

namespace equistab {

/// Spatial/label part of g on one configuration vector: (S v)_{sigma(j)} = rho v_j.
inline Matrix body_action_matrix(const GroupElement& g) {
  const int n = g.bodies();
  const int d = g.dim();
  Matrix s = Matrix::Zero(n * d, n * d);
  for (int j = 0; j < n; ++j) s.block(g.sigma[static_cast<std::size_t>(j)] * d, j * d, d, d) = g.rho;
  return s;
}

/// 2x2 action of tau on the (cos, sin) coefficient pair of frequency index k.
inline Eigen::Matrix2d time_pair_action(const TimeAction& tau, int k) {
  const double phi = 2.0 * M_PI * k * tau.fraction();
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Eigen::Matrix2d t;
  if (tau.kind() == TimeAction::Kind::rotation)
    t << c, -s, s, c;
  else
    t << c, s, s, -c;
  return t;
}

/// Linear action L_g on trigonometric coefficients, stored per mode block:
/// the constant block (nd x nd) and one (2nd x 2nd) block per frequency.
struct CoefficientAction {
  Matrix constant;
  std::vector<Matrix> pairs;  // pairs[k-1] acts on [a_k; b_k]

  Vector apply(const Vector& coef) const {
    const auto nd = constant.rows();
    Vector out(coef.size());
    out.head(nd) = constant * coef.head(nd);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto off = static_cast<Eigen::Index>((2 * k + 1)) * nd;
      out.segment(off, 2 * nd) = pairs[k] * coef.segment(off, 2 * nd);
    }
    return out;
  }

  Matrix dense() const {
    const auto nd = constant.rows();
    const auto D = static_cast<Eigen::Index>(2 * pairs.size() + 1) * nd;
    Matrix m = Matrix::Zero(D, D);
    m.topLeftCorner(nd, nd) = constant;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto off = static_cast<Eigen::Index>((2 * k + 1)) * nd;
      m.block(off, off, 2 * nd, 2 * nd) = pairs[k];
    }
    return m;
  }
};

inline CoefficientAction coefficient_action(const GroupElement& g, const ProblemSpec& spec) {
  if (g.bodies() != spec.bodies() || g.dim() != spec.dim())
    fail(ErrorCode::DimensionMismatch, "group element does not match problem");
  const Matrix s = body_action_matrix(g);
  const auto nd = s.rows();
  CoefficientAction a;
  a.constant = s;
  for (int k = 1; k <= spec.disc().K; ++k) {
    const Eigen::Matrix2d t = time_pair_action(g.tau, k);
    Matrix p(2 * nd, 2 * nd);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) p.block(r * nd, c * nd, nd, nd) = t(r, c) * s;
    a.pairs.push_back(std::move(p));
  }
  return a;
}

/// Orthogonal projector onto configurations with zero mass-weighted center.
inline Matrix center_of_mass_projector(const ProblemSpec& spec) {
  const int n = spec.bodies();
  const int d = spec.dim();
  Matrix w = Matrix::Zero(n * d, d);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) w(i * d + c, c) = spec.mass(i);
  return Matrix::Identity(n * d, n * d) - w * (w.transpose() * w).inverse() * w.transpose();
}

/// Orthonormal basis B of the G-equivariant coefficient subspace, built
/// mode block by mode block. Reduced coordinates z map to coefficients B z.
class EquivariantBasis {
 public:
  struct Block {
    int first_mode;   // 0 for the constant block, 2k-1 for pair k
    int width;        // 1 or 2 modes
    Eigen::Index col; // first reduced coordinate
    Matrix basis;     // (width * nd) x rank
  };

  EquivariantBasis(const SymmetryGroup& group, const ProblemSpec& spec, bool zero_center_of_mass = true)
      : nd_(spec.config_size()), K_(spec.disc().K) {
    std::vector<CoefficientAction> actions;
    for (const auto& g : group.elements()) actions.push_back(coefficient_action(g, spec));
    const double inv = 1.0 / static_cast<double>(actions.size());
    const Matrix com = zero_center_of_mass ? center_of_mass_projector(spec) : Matrix::Identity(nd_, nd_);

    auto add_block = [&](int first_mode, int width, const Matrix& projector) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (projector + projector.transpose()));
      std::vector<Eigen::Index> keep;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] > 1e-8) keep.push_back(i);
      Matrix b(projector.rows(), static_cast<Eigen::Index>(keep.size()));
      // Largest eigenvalues come last; reverse for a stable, canonical order.
      for (std::size_t j = 0; j < keep.size(); ++j) b.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[keep.size() - 1 - j]);
      blocks_.push_back({first_mode, width, rank_, b});
      rank_ += b.cols();
    };

    Matrix p0 = Matrix::Zero(nd_, nd_);
    for (const auto& a : actions) p0 += inv * a.constant;
    constant_projector_ = com * p0 * com;
    add_block(0, 1, constant_projector_);
    for (int k = 1; k <= K_; ++k) {
      Matrix pk = Matrix::Zero(2 * nd_, 2 * nd_);
      for (const auto& a : actions) pk += inv * a.pairs[static_cast<std::size_t>(k - 1)];
      Matrix c2 = Matrix::Zero(2 * nd_, 2 * nd_);
      c2.topLeftCorner(nd_, nd_) = com;
      c2.bottomRightCorner(nd_, nd_) = com;
      pair_projectors_.push_back(c2 * pk * c2);
      add_block(2 * k - 1, 2, pair_projectors_.back());
    }
  }

  Eigen::Index rank() const noexcept { return rank_; }
  Eigen::Index coefficient_size() const noexcept { return static_cast<Eigen::Index>(2 * K_ + 1) * nd_; }
  int order() const noexcept { return K_; }
  int config_size() const noexcept { return static_cast<int>(nd_); }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  Vector to_coefficients(const Vector& z) const {
    Vector c = Vector::Zero(coefficient_size());
    for (const auto& b : blocks_)
      c.segment(b.first_mode * nd_, b.width * nd_) = b.basis * z.segment(b.col, b.basis.cols());
    return c;
  }

  Vector to_reduced(const Vector& coef) const {
    Vector z(rank_);
    for (const auto& b : blocks_)
      z.segment(b.col, b.basis.cols()) = b.basis.transpose() * coef.segment(b.first_mode * nd_, b.width * nd_);
    return z;
  }

  /// Dense B (D x r).
  Matrix dense() const {
    Matrix m = Matrix::Zero(coefficient_size(), rank_);
    for (const auto& b : blocks_) m.block(b.first_mode * nd_, b.col, b.width * nd_, b.basis.cols()) = b.basis;
    return m;
  }

  /// Dense projector P = (1/|G|) sum_g L_g, intersected with the center-of-mass constraint if requested.
  Matrix projector() const {
    Matrix m = Matrix::Zero(coefficient_size(), coefficient_size());
    m.topLeftCorner(nd_, nd_) = constant_projector_;
    for (int k = 1; k <= K_; ++k) {
      const auto off = static_cast<Eigen::Index>(2 * k - 1) * nd_;
      m.block(off, off, 2 * nd_, 2 * nd_) = pair_projectors_[static_cast<std::size_t>(k - 1)];
    }
    return m;
  }

  Vector project(const Vector& coef) const { return to_coefficients(to_reduced(coef)); }

 private:
  Eigen::Index nd_;
  int K_;
  Eigen::Index rank_ = 0;
  std::vector<Block> blocks_;
  Matrix constant_projector_;
  std::vector<Matrix> pair_projectors_;
};

/// Loop transformed by g: (g . x)(t) = rho x_{sigma^-1}(tau^-1 t).
inline Vector act_on_loop_at(const GroupElement& g, const TrigLoop& loop, double t) {
  const double s = g.tau.inverse().apply(t, loop.period());
  const Vector x = loop.position(s);
  Vector out(x.size());
  const int d = loop.dim();
  for (int j = 0; j < loop.bodies(); ++j)
    out.segment(g.sigma[static_cast<std::size_t>(j)] * d, d) = g.rho * x.segment(j * d, d);
  return out;
}

/// max over g and 256 sample times of |(g . x)(t) - x(t)| / max_t |x(t)|.
inline double check_equivariance(const TrigLoop& loop, const SymmetryGroup& group) {
  if (loop.bodies() != group.bodies() || loop.dim() != group.dim())
    fail(ErrorCode::DimensionMismatch, "loop does not match group");
  constexpr int samples = 256;
  double scale = 0.0;
  std::vector<Vector> xs;
  for (int s = 0; s < samples; ++s) {
    xs.push_back(loop.position(s * loop.period() / samples));
    scale = std::max(scale, xs.back().norm());
  }
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& g : group.elements()) {
    for (int s = 0; s < samples; ++s) {
      const double t = s * loop.period() / samples;
      worst = std::max(worst, (act_on_loop_at(g, loop, t) - xs[static_cast<std::size_t>(s)]).norm());
    }
  }
  return worst / scale;
}

namespace detail {

/// int_0^pi sin(a t) dt and int_0^pi cos(a t) dt with a = num / den.
inline double sine_integral(long num, long den) {
  if (num == 0) return 0.0;
  const double a = static_cast<double>(num) / static_cast<double>(den);
  return (1.0 - std::cos(a * M_PI)) / a;
}

inline double cosine_integral(long num, long den) {
  if (num == 0) return M_PI;
  const double a = static_cast<double>(num) / static_cast<double>(den);
  return std::sin(a * M_PI) / a;
}

}  // namespace detail

/// Fundamental-domain form of a loop on [0, pi]: endpoints are exact samples,
/// sine coefficients are the exact L2 projection of the remainder.
inline FundamentalPath restrict_to_fundamental(const TrigLoop& loop, int F) {
  FundamentalPath path(loop.bodies(), loop.dim(), F);
  path.x0() = loop.position(0.0);
  path.x1() = loop.position(M_PI);
  const Vector x0 = path.x0();
  const Vector dx = path.x1() - path.x0();
  // Frequencies of the loop are omega_j = 2 j / l on [0, T = l pi].
  const long l = std::lround(loop.period() / M_PI);
  for (int k = 1; k <= F; ++k) {
    const double sk = detail::sine_integral(k, 1);
    const double tk = -M_PI * ((k % 2 == 0) ? 1.0 : -1.0) / k;  // int_0^pi t sin(kt) dt
    Vector acc = -sk * x0 - (tk / M_PI) * dx;
    acc += sk * loop.mode_block(0);
    for (int j = 1; j <= loop.order(); ++j) {
      const long kp = k * l + 2 * j;
      const long km = k * l - 2 * j;
      const double cs = 0.5 * (detail::sine_integral(kp, l) + detail::sine_integral(km, l));
      const double ss = 0.5 * (detail::cosine_integral(km, l) - detail::cosine_integral(kp, l));
      acc += cs * loop.mode_block(TrigLoop::cos_mode(j)) + ss * loop.mode_block(TrigLoop::sin_mode(j));
    }
    path.sine(k) = (2.0 / M_PI) * acc;
  }
  return path;
}

struct UnfoldResult {
  TrigLoop loop;
  double joint_mismatch = 0.0;
};

/// Value of the symmetrized path at time t in [0, T): segment k is coset_reps[k] applied to the path.
inline Vector unfolded_position(const FundamentalPath& path, const SymmetryGroup& group, double t) {
  const int l = group.quotient_order();
  const double T = group.period();
  int k = static_cast<int>(std::floor(t / M_PI));
  k = std::clamp(k, 0, l - 1);
  const auto& g = group.coset_reps()[static_cast<std::size_t>(k)];
  double s = std::fmod(g.tau.inverse().apply(t, T), T);
  if (s < 0) s += T;
  if (s > M_PI) s = (s > 0.5 * (M_PI + T)) ? 0.0 : M_PI;  // rounding at the segment edges
  const Vector y = path.position(s);
  const int d = path.dim();
  Vector out(y.size());
  for (int j = 0; j < path.bodies(); ++j) out.segment(g.sigma[static_cast<std::size_t>(j)] * d, d) = g.rho * y.segment(j * d, d);
  return out;
}

/// Concatenate the coset images of the fundamental path over [0, T] and fit
/// K trigonometric modes by least squares on a uniform grid (which reduces to
/// a discrete Fourier projection).
inline UnfoldResult unfold(const FundamentalPath& path, const SymmetryGroup& group, int K, double tol = 1e-8) {
  if (path.bodies() != group.bodies() || path.dim() != group.dim())
    fail(ErrorCode::DimensionMismatch, "path does not match group");
  const int l = group.quotient_order();
  const double T = group.period();
  const int nd = path.block();

  // Joint continuity between consecutive segments.
  double scale = 1.0;
  for (int k = 0; k < path.block(); ++k) scale = std::max({scale, std::abs(path.x0()[k]), std::abs(path.x1()[k])});
  double mismatch = 0.0;
  for (int k = 0; k < l; ++k) {
    const double t = (k + 1) * M_PI;
    const auto apply_rep = [&](int seg, double time) {
      const auto& g = group.coset_reps()[static_cast<std::size_t>(seg % l)];
      double s = std::fmod(g.tau.inverse().apply(time, T), T);
      if (s < 0) s += T;
      if (std::abs(s - T) < 1e-9) s = 0.0;
      s = std::clamp(s, 0.0, M_PI);
      const Vector y = path.position(s);
      Vector out(y.size());
      const int d = path.dim();
      for (int j = 0; j < path.bodies(); ++j) out.segment(g.sigma[static_cast<std::size_t>(j)] * d, d) = g.rho * y.segment(j * d, d);
      return out;
    };
    const Vector left = apply_rep(k, t);
    const Vector right = apply_rep(k + 1, std::fmod(t, T));
    mismatch = std::max(mismatch, (left - right).cwiseAbs().maxCoeff());
  }
  if (mismatch > tol * scale)
    fail(ErrorCode::DiscontinuousUnfold, "joint mismatch " + std::to_string(mismatch) + " exceeds tolerance");

  int samples = std::max({8 * K, 64 * l, 1024});
  samples += (2 * l - samples % (2 * l)) % (2 * l);
  Matrix values(nd, samples);
  for (int s = 0; s < samples; ++s) values.col(s) = unfolded_position(path, group, s * T / samples);

  TrigLoop loop(path.bodies(), path.dim(), K, T);
  loop.mode_block(0) = values.rowwise().mean();
  for (int k = 1; k <= K; ++k) {
    Vector a = Vector::Zero(nd);
    Vector b = Vector::Zero(nd);
    for (int s = 0; s < samples; ++s) {
      const double w = 2.0 * M_PI * k * s / samples;
      a += std::cos(w) * values.col(s);
      b += std::sin(w) * values.col(s);
    }
    loop.mode_block(TrigLoop::cos_mode(k)) = (2.0 / samples) * a;
    loop.mode_block(TrigLoop::sin_mode(k)) = (2.0 / samples) * b;
  }
  return {loop, mismatch};
}

/// Orthonormal basis (sparse, (M nd) x r) of G-equivariant values on the
/// uniform grid t_k = k T / M. Requires T/M to divide every time shift of G.
inline Eigen::SparseMatrix<double> grid_equivariant_basis(const SymmetryGroup& group, int M) {
  const int n = group.bodies();
  const int d = group.dim();
  const auto node_image = [&](const GroupElement& g, int k) {
    const auto& tau = g.tau;
    const long shift = tau.num() * M;
    if (shift % tau.den() != 0) fail(ErrorCode::SchemaError, "grid size incompatible with group time shifts");
    const long f = shift / tau.den();
    long img = tau.kind() == TimeAction::Kind::rotation ? k + f : f - k;
    img %= M;
    if (img < 0) img += M;
    return static_cast<int>(img);
  };

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<bool> seen(static_cast<std::size_t>(M * n), false);
  Eigen::Index col = 0;
  for (int k = 0; k < M; ++k) {
    for (int i = 0; i < n; ++i) {
      const int p = k * n + i;
      if (seen[static_cast<std::size_t>(p)]) continue;
      // Orbit of (k, i) with one group element per image, and the stabilizer average.
      std::map<int, const GroupElement*> orbit;
      Matrix stab = Matrix::Zero(d, d);
      int stab_count = 0;
      for (const auto& g : group.elements()) {
        const int q = node_image(g, k) * n + g.sigma[static_cast<std::size_t>(i)];
        orbit.emplace(q, &g);
        if (q == p) {
          stab += g.rho;
          ++stab_count;
        }
      }
      stab /= stab_count;
      for (const auto& [q, g] : orbit) seen[static_cast<std::size_t>(q)] = true;
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (stab + stab.transpose()));
      const double norm = 1.0 / std::sqrt(static_cast<double>(orbit.size()));
      for (int e = d - 1; e >= 0; --e) {
        if (es.eigenvalues()[e] < 0.5) continue;
        const Vector v = es.eigenvectors().col(e);
        for (const auto& [q, g] : orbit) {
          const Vector w = g->rho * v;
          for (int c = 0; c < d; ++c)
            if (w[c] != 0.0) triplets.emplace_back(q * d + c, col, norm * w[c]);
        }
        ++col;
      }
    }
  }
  Eigen::SparseMatrix<double> b(static_cast<Eigen::Index>(M) * n * d, col);
  b.setFromTriplets(triplets.begin(), triplets.end());
  return b;
}

}  // namespace equistab
