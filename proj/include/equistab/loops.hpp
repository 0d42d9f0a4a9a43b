#pragma once

// Orbit representations. Every flat coefficient vector is ordered
// (mode-major, body, coordinate): entry (m * n + i) * d + c.

#include <Eigen/Dense>

#include <cmath>

#include "equistab/dynamics.hpp"

namespace equistab {

/// Full-period trigonometric loop
///   x(t) = a0 + sum_{k=1..K} a_k cos(2 pi k t / T) + b_k sin(2 pi k t / T).
/// Modes are laid out as [a0, a1, b1, a2, b2, ...].
class TrigLoop {
 public:
  TrigLoop() = default;
  TrigLoop(int n, int d, int K, double period) : n_(n), d_(d), K_(K), period_(period), coef_(Vector::Zero((2 * K + 1) * n * d)) {}
  TrigLoop(int n, int d, int K, double period, Vector coef) : n_(n), d_(d), K_(K), period_(period), coef_(std::move(coef)) {
    if (coef_.size() != (2 * K + 1) * n * d) fail(ErrorCode::DimensionMismatch, "trig coefficient count mismatch");
  }

  int bodies() const noexcept { return n_; }
  int dim() const noexcept { return d_; }
  int order() const noexcept { return K_; }
  int modes() const noexcept { return 2 * K_ + 1; }
  int block() const noexcept { return n_ * d_; }
  double period() const noexcept { return period_; }
  double frequency(int k) const noexcept { return 2.0 * M_PI * k / period_; }
  const Vector& coefficients() const noexcept { return coef_; }
  Vector& coefficients() noexcept { return coef_; }

  static int cos_mode(int k) { return k == 0 ? 0 : 2 * k - 1; }
  static int sin_mode(int k) { return 2 * k; }

  auto mode_block(int m) const { return coef_.segment(m * block(), block()); }
  auto mode_block(int m) { return coef_.segment(m * block(), block()); }

  /// Value of basis function m at time t.
  double basis(int m, double t) const {
    if (m == 0) return 1.0;
    const int k = (m + 1) / 2;
    return (m % 2 == 1) ? std::cos(frequency(k) * t) : std::sin(frequency(k) * t);
  }

  Vector position(double t) const {
    Vector x = mode_block(0);
    for (int k = 1; k <= K_; ++k) {
      const double w = frequency(k) * t;
      x += std::cos(w) * mode_block(cos_mode(k)) + std::sin(w) * mode_block(sin_mode(k));
    }
    return x;
  }

  Vector velocity(double t) const {
    Vector v = Vector::Zero(block());
    for (int k = 1; k <= K_; ++k) {
      const double om = frequency(k);
      const double w = om * t;
      v += om * (-std::sin(w) * mode_block(cos_mode(k)) + std::cos(w) * mode_block(sin_mode(k)));
    }
    return v;
  }

  Vector acceleration(double t) const {
    Vector a = Vector::Zero(block());
    for (int k = 1; k <= K_; ++k) {
      const double om = frequency(k);
      const double w = om * t;
      a -= om * om * (std::cos(w) * mode_block(cos_mode(k)) + std::sin(w) * mode_block(sin_mode(k)));
    }
    return a;
  }

  /// Same loop with order changed (zero-padded or truncated).
  TrigLoop resized(int K) const {
    TrigLoop out(n_, d_, K, period_);
    const int m = std::min(modes(), out.modes());
    out.coef_.head(m * block()) = coef_.head(m * block());
    return out;
  }

 private:
  int n_ = 0;
  int d_ = 0;
  int K_ = 0;
  double period_ = 2.0 * M_PI;
  Vector coef_;
};

/// Fundamental-domain path on [0, pi]:
///   x(t) = x0 + (t / pi)(x1 - x0) + sum_{k=1..F} A_k sin(k t).
/// Blocks are laid out as [x0, x1, A_1, ..., A_F].
class FundamentalPath {
 public:
  FundamentalPath() = default;
  FundamentalPath(int n, int d, int F) : n_(n), d_(d), F_(F), coef_(Vector::Zero((F + 2) * n * d)) {}
  FundamentalPath(int n, int d, int F, Vector coef) : n_(n), d_(d), F_(F), coef_(std::move(coef)) {
    if (coef_.size() != (F + 2) * n * d) fail(ErrorCode::DimensionMismatch, "fundamental coefficient count mismatch");
  }

  int bodies() const noexcept { return n_; }
  int dim() const noexcept { return d_; }
  int sine_modes() const noexcept { return F_; }
  int block() const noexcept { return n_ * d_; }
  const Vector& coefficients() const noexcept { return coef_; }
  Vector& coefficients() noexcept { return coef_; }

  auto x0() const { return coef_.segment(0, block()); }
  auto x1() const { return coef_.segment(block(), block()); }
  auto x0() { return coef_.segment(0, block()); }
  auto x1() { return coef_.segment(block(), block()); }
  auto sine(int k) const { return coef_.segment((1 + k) * block(), block()); }
  auto sine(int k) { return coef_.segment((1 + k) * block(), block()); }

  /// Basis value of block b at t: 1 - t/pi, t/pi, sin(k t).
  static double basis(int b, double t) {
    if (b == 0) return 1.0 - t / M_PI;
    if (b == 1) return t / M_PI;
    return std::sin((b - 1) * t);
  }

  Vector position(double t) const {
    Vector x = x0() + (t / M_PI) * (x1() - x0());
    for (int k = 1; k <= F_; ++k) x += std::sin(k * t) * sine(k);
    return x;
  }

  Vector velocity(double t) const {
    Vector v = (x1() - x0()) / M_PI;
    for (int k = 1; k <= F_; ++k) v += (k * std::cos(k * t)) * sine(k);
    return v;
  }

 private:
  int n_ = 0;
  int d_ = 0;
  int F_ = 0;
  Vector coef_;
};

/// Uniform periodic samples x(t_k), t_k = k T / M, k = 0..M-1.
class SampledLoop {
 public:
  SampledLoop() = default;
  SampledLoop(int n, int d, int M, double period) : n_(n), d_(d), M_(M), period_(period), values_(Vector::Zero(M * n * d)) {}
  SampledLoop(int n, int d, int M, double period, Vector values)
      : n_(n), d_(d), M_(M), period_(period), values_(std::move(values)) {
    if (values_.size() != M * n * d) fail(ErrorCode::DimensionMismatch, "sample count mismatch");
  }

  static SampledLoop sample(const TrigLoop& loop, int M) {
    SampledLoop s(loop.bodies(), loop.dim(), M, loop.period());
    for (int k = 0; k < M; ++k) s.values_.segment(k * s.block(), s.block()) = loop.position(k * loop.period() / M);
    return s;
  }

  int bodies() const noexcept { return n_; }
  int dim() const noexcept { return d_; }
  int nodes() const noexcept { return M_; }
  int block() const noexcept { return n_ * d_; }
  double period() const noexcept { return period_; }
  double step() const noexcept { return period_ / M_; }
  const Vector& values() const noexcept { return values_; }
  Vector& values() noexcept { return values_; }

  auto node(int k) const { return values_.segment(wrap(k) * block(), block()); }
  auto node(int k) { return values_.segment(wrap(k) * block(), block()); }
  int wrap(int k) const { return ((k % M_) + M_) % M_; }

 private:
  int n_ = 0;
  int d_ = 0;
  int M_ = 0;
  double period_ = 2.0 * M_PI;
  Vector values_;
};

}  // namespace equistab
