#pragma once

// Finite symmetry groups acting on n-body loops through space (rho), the time
// circle (tau) and body labels (sigma).
//
// Loop action convention, used everywhere in the library:
//   (g . x)_i(t) = rho(g) x_{sigma(g)^-1(i)}(tau(g)^-1 t)
// so that g . (h . x) = (gh) . x with gh = (rho_g rho_h, sigma_g o sigma_h, tau_g o tau_h).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "equistab/error.hpp"

namespace equistab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Element of O(2) acting on the time circle, stored as an exact fraction of
/// the period. On the circle coordinate theta = t/T in [0, 1):
///   rotation   theta -> theta + f
///   reflection theta -> f - theta   (mirror axis at angle pi f)
class TimeAction {
 public:
  enum class Kind { rotation, reflection };

  TimeAction() = default;
  TimeAction(Kind kind, std::int64_t num, std::int64_t den) : kind_(kind) {
    if (den <= 0) fail(ErrorCode::SchemaError, "time action denominator must be positive");
    std::int64_t p = num % den;
    if (p < 0) p += den;
    const std::int64_t g = std::gcd(p, den);
    num_ = p / g;
    den_ = den / g;
  }

  static TimeAction identity() { return {}; }
  static TimeAction rotation(std::int64_t num, std::int64_t den) { return {Kind::rotation, num, den}; }
  static TimeAction reflection(std::int64_t num, std::int64_t den) { return {Kind::reflection, num, den}; }

  Kind kind() const noexcept { return kind_; }
  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double fraction() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_identity() const noexcept { return kind_ == Kind::rotation && num_ == 0; }
  bool is_reflection() const noexcept { return kind_ == Kind::reflection; }

  TimeAction inverse() const {
    if (kind_ == Kind::reflection) return *this;
    return rotation(-num_, den_);
  }

  /// (a * b)(theta) = a(b(theta)).
  friend TimeAction operator*(const TimeAction& a, const TimeAction& b) {
    const std::int64_t den = std::lcm(a.den_, b.den_);
    const std::int64_t fa = a.num_ * (den / a.den_);
    const std::int64_t fb = b.num_ * (den / b.den_);
    if (a.kind_ == Kind::rotation && b.kind_ == Kind::rotation) return rotation(fa + fb, den);
    if (a.kind_ == Kind::rotation) return reflection(fa + fb, den);
    if (b.kind_ == Kind::rotation) return reflection(fa - fb, den);
    return rotation(fa - fb, den);
  }

  friend bool operator==(const TimeAction& a, const TimeAction& b) {
    return a.kind_ == b.kind_ && a.num_ == b.num_ && a.den_ == b.den_;
  }

  /// Image of time t on a circle of length period.
  double apply(double t, double period) const {
    const double shift = fraction() * period;
    return kind_ == Kind::rotation ? t + shift : shift - t;
  }

  std::string to_string() const {
    std::ostringstream os;
    if (kind_ == Kind::rotation && num_ == 0) return "identity";
    os << (kind_ == Kind::rotation ? "rotation" : "reflection") << ' ' << num_;
    if (den_ != 1) os << '/' << den_;
    return os.str();
  }

 private:
  Kind kind_ = Kind::rotation;
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Zero-based permutation: perm[i] is the image of body i.
using Permutation = std::vector<int>;

inline Permutation identity_permutation(int n) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline Permutation inverse(const Permutation& p) {
  Permutation q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
  return q;
}

inline bool is_bijection(const Permutation& p) {
  std::vector<bool> seen(p.size(), false);
  for (int v : p) {
    if (v < 0 || static_cast<std::size_t>(v) >= p.size() || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

/// Cycle notation with 1-based labels, "()" for the identity.
inline std::string cycle_notation(const Permutation& p) {
  std::vector<bool> seen(p.size(), false);
  std::ostringstream os;
  bool any = false;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (seen[s] || p[s] == static_cast<int>(s)) continue;
    any = true;
    os << '(';
    std::size_t i = s;
    bool first = true;
    while (!seen[i]) {
      seen[i] = true;
      if (!first) os << ',';
      os << i + 1;
      first = false;
      i = static_cast<std::size_t>(p[i]);
    }
    os << ')';
  }
  return any ? os.str() : "()";
}

struct GroupElement {
  Matrix rho;
  Permutation sigma;
  TimeAction tau;
  std::string name;

  static GroupElement identity(int n, int d) {
    return {Matrix::Identity(d, d), identity_permutation(n), TimeAction::identity(), "Id"};
  }

  int dim() const { return static_cast<int>(rho.rows()); }
  int bodies() const { return static_cast<int>(sigma.size()); }

  double orthogonality_defect() const {
    return (rho.transpose() * rho - Matrix::Identity(rho.rows(), rho.cols())).cwiseAbs().maxCoeff();
  }

  void validate() const {
    if (rho.rows() != rho.cols()) fail(ErrorCode::DimensionMismatch, "rho must be square");
    if (orthogonality_defect() > 1e-12) fail(ErrorCode::NonOrthogonalRho, "rho of '" + name + "' is not orthogonal");
    if (!is_bijection(sigma)) fail(ErrorCode::SchemaError, "sigma of '" + name + "' is not a permutation");
  }

  /// Same spatial and label action (tau ignored).
  bool same_action(const GroupElement& o, double tol = 1e-10) const {
    return sigma == o.sigma && (rho - o.rho).cwiseAbs().maxCoeff() <= tol;
  }

  friend GroupElement operator*(const GroupElement& g, const GroupElement& h) {
    GroupElement r;
    r.rho = g.rho * h.rho;
    r.sigma.resize(g.sigma.size());
    for (std::size_t i = 0; i < g.sigma.size(); ++i) r.sigma[i] = g.sigma[static_cast<std::size_t>(h.sigma[i])];
    r.tau = g.tau * h.tau;
    return r;
  }
};

/// Rotation matrix R(theta) in the plane.
inline Matrix planar_rotation(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

class SymmetryGroup {
 public:
  const std::vector<GroupElement>& elements() const noexcept { return elements_; }
  const std::vector<GroupElement>& kernel_tau() const noexcept { return kernel_; }
  const std::vector<GroupElement>& coset_reps() const noexcept { return coset_reps_; }
  const std::vector<GroupElement>& generators() const noexcept { return generators_; }
  int order() const noexcept { return static_cast<int>(elements_.size()); }
  /// |G / ker tau|.
  int quotient_order() const noexcept { return quotient_order_; }
  double period() const noexcept { return quotient_order_ * M_PI; }
  int bodies() const noexcept { return n_; }
  int dim() const noexcept { return d_; }
  bool has_reflections() const {
    return std::any_of(elements_.begin(), elements_.end(), [](const auto& g) { return g.tau.is_reflection(); });
  }

  friend SymmetryGroup build_group(const std::vector<GroupElement>& generators, int n, int d, int cap);

 private:
  std::vector<GroupElement> elements_;
  std::vector<GroupElement> kernel_;
  std::vector<GroupElement> coset_reps_;
  std::vector<GroupElement> generators_;
  int quotient_order_ = 1;
  int n_ = 0;
  int d_ = 0;
};

/// Closure of the generators under composition. Coset representative k maps
/// the fundamental domain [0, pi] onto the period segment [k pi, (k+1) pi].
inline SymmetryGroup build_group(const std::vector<GroupElement>& generators, int n, int d, int cap = 4096) {
  if (cap < 1) fail(ErrorCode::SchemaError, "group cap must be positive");
  for (const auto& g : generators) {
    if (g.dim() != d || g.bodies() != n) fail(ErrorCode::DimensionMismatch, "generator '" + g.name + "' has wrong size");
    g.validate();
  }

  SymmetryGroup G;
  G.n_ = n;
  G.d_ = d;
  G.generators_ = generators;
  G.elements_.push_back(GroupElement::identity(n, d));

  auto find = [&](const GroupElement& x) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < G.elements_.size(); ++i)
      if (G.elements_[i].same_action(x)) return i;
    return std::nullopt;
  };

  // Breadth-first closure: right-multiply every element by every generator.
  for (std::size_t head = 0; head < G.elements_.size(); ++head) {
    for (const auto& gen : generators) {
      GroupElement prod = G.elements_[head] * gen;
      if (auto idx = find(prod)) {
        if (!(G.elements_[*idx].tau == prod.tau))
          fail(ErrorCode::InconsistentTau, "two products agree in (rho, sigma) but differ in tau (" +
                                               G.elements_[*idx].tau.to_string() + " vs " + prod.tau.to_string() + ")");
        continue;
      }
      if (static_cast<int>(G.elements_.size()) >= cap)
        fail(ErrorCode::GroupNotClosed, "closure exceeds cap of " + std::to_string(cap) + " elements");
      G.elements_.push_back(std::move(prod));
    }
  }
  for (std::size_t i = 1; i < G.elements_.size(); ++i) {
    auto& e = G.elements_[i];
    if (e.name.empty()) e.name = "g" + std::to_string(i);
  }
  for (const auto& e : G.elements_)
    if (e.tau.is_identity()) G.kernel_.push_back(e);

  const auto order = G.elements_.size();
  if (order % G.kernel_.size() != 0) fail(ErrorCode::InconsistentTau, "kernel of tau does not divide the group order");
  G.quotient_order_ = static_cast<int>(order / G.kernel_.size());
  const int l = G.quotient_order_;

  // Distinct time actions must realize exactly l elements tiling the circle.
  std::vector<TimeAction> taus;
  for (const auto& e : G.elements_)
    if (std::none_of(taus.begin(), taus.end(), [&](const auto& t) { return t == e.tau; })) taus.push_back(e.tau);
  if (static_cast<int>(taus.size()) != l) fail(ErrorCode::InconsistentTau, "tau image has unexpected size");

  for (int k = 0; k < l; ++k) {
    const TimeAction as_rotation = TimeAction::rotation(k, l);
    const TimeAction as_reflection = TimeAction::reflection(k + 1, l);
    const GroupElement* rep = nullptr;
    for (const auto& e : G.elements_) {
      if (e.tau == as_rotation) {
        rep = &e;
        break;
      }
    }
    if (rep == nullptr) {
      for (const auto& e : G.elements_) {
        if (e.tau == as_reflection) {
          rep = &e;
          break;
        }
      }
    }
    if (rep == nullptr)
      fail(ErrorCode::InconsistentTau, "no group element maps [0, pi] onto period segment " + std::to_string(k));
    G.coset_reps_.push_back(*rep);
  }
  return G;
}

/// Time-action presets. Kernel generators always act trivially in time; the
/// remaining generators receive tau in order:
///   cyclic(l):   first generator rotates time by T/l.
///   dihedral(l): first generator rotates by 2T/l, second reflects about t = 0.
///   brake:       first generator reflects about t = 0 (l = 2).
namespace presets {

inline void cyclic(std::vector<GroupElement>& gens, int l) {
  if (gens.empty()) fail(ErrorCode::SchemaError, "cyclic preset needs one generator");
  gens[0].tau = TimeAction::rotation(1, l);
}

inline void dihedral(std::vector<GroupElement>& gens, int l) {
  if (gens.size() < 2 || l % 2 != 0) fail(ErrorCode::SchemaError, "dihedral preset needs two generators and even l");
  gens[0].tau = TimeAction::rotation(2, l);
  gens[1].tau = TimeAction::reflection(0, 1);
}

inline void brake(std::vector<GroupElement>& gens) {
  if (gens.empty()) fail(ErrorCode::SchemaError, "brake preset needs one generator");
  gens[0].tau = TimeAction::reflection(0, 1);
}

}  // namespace presets

/// Configurations are n x d matrices, row i holding body i.
inline Matrix act_on_configuration(const GroupElement& g, const Matrix& c) {
  if (c.rows() != g.bodies() || c.cols() != g.dim())
    fail(ErrorCode::DimensionMismatch, "configuration does not match group element");
  Matrix out(c.rows(), c.cols());
  for (int i = 0; i < c.rows(); ++i) {
    out.row(g.sigma[static_cast<std::size_t>(i)]) = (g.rho * c.row(i).transpose()).transpose();
  }
  return out;
}

}  // namespace equistab
