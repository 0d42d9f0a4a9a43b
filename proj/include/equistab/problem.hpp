#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "equistab/symmetry.hpp"

namespace equistab {

/// Discretization sizes shared by every representation of an orbit.
struct Discretization {
  int K = 32;                     ///< full-period trigonometric order
  int F = 32;                     ///< sine modes on the fundamental domain
  int M = 256;                    ///< time-grid size, rounded up to a multiple of l (quadrature uses 4M nodes)
  double min_separation = 1e-6;   ///< collision guard delta
};

/// Immutable problem definition. Gravitational constant is 1.
class ProblemSpec {
 public:
  ProblemSpec(std::vector<double> masses, int d, SymmetryGroup group, Discretization disc = {})
      : masses_(std::move(masses)), d_(d), group_(std::move(group)), disc_(disc) {
    const int n = bodies();
    if (n < 2) fail(ErrorCode::SchemaError, "need at least two bodies");
    if (d_ != 2 && d_ != 3) fail(ErrorCode::SchemaError, "space dimension must be 2 or 3");
    for (double m : masses_)
      if (!(m > 0.0) || !std::isfinite(m)) fail(ErrorCode::SchemaError, "masses must be positive");
    if (group_.bodies() != n || group_.dim() != d_)
      fail(ErrorCode::DimensionMismatch, "group does not act on this problem's bodies/dimension");
    if (disc_.K < 1 || disc_.F < 1 || disc_.M < 8 || !(disc_.min_separation > 0.0))
      fail(ErrorCode::SchemaError, "discretization requires K >= 1, F >= 1, M >= 8, delta > 0");
    // The time grid must be invariant under the period shifts k T / l.
    const int l = group_.quotient_order();
    disc_.M = (disc_.M + l - 1) / l * l;
    for (const auto& g : group_.elements())
      for (int i = 0; i < n; ++i)
        if (masses_[static_cast<std::size_t>(i)] != masses_[static_cast<std::size_t>(g.sigma[static_cast<std::size_t>(i)])])
          fail(ErrorCode::MassOrbitMismatch, "sigma permutes bodies " + std::to_string(i + 1) + " and " +
                                                 std::to_string(g.sigma[static_cast<std::size_t>(i)] + 1) +
                                                 " of unequal mass");
  }

  int bodies() const noexcept { return static_cast<int>(masses_.size()); }
  int dim() const noexcept { return d_; }
  /// n * d, the size of one configuration vector.
  int config_size() const noexcept { return bodies() * d_; }
  const std::vector<double>& masses() const noexcept { return masses_; }
  double mass(int i) const { return masses_[static_cast<std::size_t>(i)]; }
  double total_mass() const {
    double s = 0.0;
    for (double m : masses_) s += m;
    return s;
  }
  const SymmetryGroup& group() const noexcept { return group_; }
  const Discretization& disc() const noexcept { return disc_; }
  int quotient_order() const noexcept { return group_.quotient_order(); }
  double period() const noexcept { return group_.period(); }
  double delta() const noexcept { return disc_.min_separation; }

  ProblemSpec with_disc(Discretization disc) const { return ProblemSpec(masses_, d_, group_, disc); }

 private:
  std::vector<double> masses_;
  int d_;
  SymmetryGroup group_;
  Discretization disc_;
};

}  // namespace equistab
