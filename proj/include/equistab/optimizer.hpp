#pragma once

// Critical points of the reduced action z -> A(B z) / l: gradient descent with
// Armijo backtracking, then full-memory BFGS, then damped Newton refinement.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "equistab/action.hpp"

namespace equistab {

struct MethodStage {
  std::string method;
  int iterations = 0;
  double final_norm = 0.0;
};

struct OptimizationReport {
  double action_value = 0.0;  // fundamental-domain convention
  double gradient_norm = 0.0;
  int iterations = 0;
  std::vector<MethodStage> method_trace;
  double min_separation_seen = std::numeric_limits<double>::infinity();
  bool collision_flag = false;
  std::uint64_t seed = 0;
  std::optional<ErrorCode> error;  // MaxIterations when the tolerance was not met

  bool converged() const { return !error.has_value(); }
};

struct OptimizedPoint {
  Vector z;
  OptimizationReport report;
};

struct MinimizeOptions {
  double c1 = 1e-4;
  double tol_fo = 1e-6;
  int first_order_iterations = 25;
  int max_iter = 4000;
  int max_halvings = 60;
  // Below handoff, a window of stall_window accepted steps that fails to halve
  // the gradient norm ends the descent early (roundoff-limited regime).
  double handoff = 1e-4;
  int stall_window = 50;
};

struct NewtonOptions {
  double tol = 1e-10;
  double basin = 1e-4;
  int max_iter = 50;
  double lambda0 = 1e-8;
  double lambda_max = 1e4;
};

/// Random equivariant starting point: coefficient blocks of order k drawn with
/// standard deviation c / k^2 (c for the constant block), projected onto the
/// equivariant subspace and scaled away from collisions.
inline Vector random_init(const LoopAction& A, std::uint64_t seed, double c = 1.0) {
  const EquivariantBasis& B = A.basis();
  if (B.rank() == 0) fail(ErrorCode::DegenerateProjection, "equivariant subspace is {0}; increase K");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const int nd = B.config_size();
  Vector coef(B.coefficient_size());
  for (Eigen::Index j = 0; j < coef.size(); ++j) {
    const int k = static_cast<int>((j / nd + 1) / 2);
    coef[j] = N(rng) * (k == 0 ? c : c / (k * k));
  }
  Vector z = B.to_reduced(coef);
  if (z.norm() == 0.0) fail(ErrorCode::DegenerateProjection, "random draw projected to zero");
  const double floor = 10.0 * A.spec().delta();
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double r = A.min_separation(B.to_coefficients(z));
    if (r >= floor) break;
    z *= std::max(2.0, 1.01 * floor / std::max(r, 1e-300));
  }
  return z;
}

namespace detail {

struct Evaluation {
  double value;
  Vector grad;
};

inline std::optional<Evaluation> try_evaluate(const LoopAction& A, const Vector& z) {
  try {
    return Evaluation{A.value(z), A.gradient(z)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CollisionalPath) return std::nullopt;
    throw;
  }
}

inline void note_separation(const LoopAction& A, const Vector& z, OptimizationReport& rep) {
  const double r = A.min_separation(A.basis().to_coefficients(z));
  rep.min_separation_seen = std::min(rep.min_separation_seen, r);
  if (r < A.spec().delta()) rep.collision_flag = true;
}

}  // namespace detail

/// Descent to a reduced-gradient norm of opts.tol_fo. MaxIterations is reported
/// through report.error together with the best iterate; CollisionStall throws.
inline OptimizedPoint minimize(const LoopAction& A, Vector z, const MinimizeOptions& opts = {}) {
  OptimizedPoint out;
  OptimizationReport& rep = out.report;
  auto cur = detail::try_evaluate(A, z);
  if (!cur) fail(ErrorCode::CollisionalPath, "initial point is collisional");
  detail::note_separation(A, z, rep);

  const Eigen::Index r = z.size();
  Matrix H = Matrix::Identity(r, r);
  bool have_h = false;
  double alpha = 1.0 / std::max(1.0, cur->grad.norm());
  int it = 0;
  int stage_start = 0;
  bool quasi_newton = false;
  double window_ref = cur->grad.norm();
  int window_start = 0;

  auto close_stage = [&](const char* name) {
    rep.method_trace.push_back({name, it - stage_start, cur->grad.norm()});
    stage_start = it;
  };

  while (cur->grad.norm() > opts.tol_fo && it < opts.max_iter) {
    if (!quasi_newton && it >= opts.first_order_iterations) {
      close_stage("gradient-descent");
      quasi_newton = true;
    }
    Vector p = quasi_newton ? Vector(-(H * cur->grad)) : Vector(-cur->grad);
    double slope = cur->grad.dot(p);
    if (slope >= 0.0) {  // lost descent: restart the quasi-Newton model
      H.setIdentity();
      have_h = false;
      p = -cur->grad;
      slope = -cur->grad.squaredNorm();
    }
    double step = quasi_newton ? 1.0 : alpha;
    int collisions = 0;
    std::optional<detail::Evaluation> next;
    Vector trial;
    for (int h = 0; h <= opts.max_halvings; ++h, step *= 0.5) {
      trial = z + step * p;
      next = detail::try_evaluate(A, trial);
      if (!next) {
        ++collisions;
        continue;
      }
      if (next->value <= cur->value + opts.c1 * step * slope) break;
      next.reset();
    }
    if (!next) {
      if (collisions > opts.max_halvings / 2) fail(ErrorCode::CollisionStall, "line search stalled against the collision set");
      if (quasi_newton && have_h) {
        H.setIdentity();
        have_h = false;
        continue;
      }
      break;  // no decrease representable in floating point
    }
    const Vector s = trial - z;
    const Vector y = next->grad - cur->grad;
    z = trial;
    cur = std::move(next);
    ++it;
    detail::note_separation(A, z, rep);
    if (cur->grad.norm() < 0.5 * window_ref) {
      window_ref = cur->grad.norm();
      window_start = it;
    } else if (it - window_start >= opts.stall_window && cur->grad.norm() <= opts.handoff) {
      break;
    }
    if (!quasi_newton) {
      alpha = std::min(2.0 * step, 1e3);
      continue;
    }
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!have_h) {
        H = (sy / y.squaredNorm()) * Matrix::Identity(r, r);
        have_h = true;
      }
      const double rho = 1.0 / sy;
      const Vector Hy = H * y;
      H += (rho * rho * y.dot(Hy) + rho) * (s * s.transpose()) - rho * (Hy * s.transpose() + s * Hy.transpose());
    }
  }
  close_stage(quasi_newton ? "bfgs" : "gradient-descent");
  out.z = std::move(z);
  rep.action_value = cur->value;
  rep.gradient_norm = cur->grad.norm();
  rep.iterations = it;
  if (rep.gradient_norm > opts.tol_fo) rep.error = ErrorCode::MaxIterations;
  return out;
}

/// Newton iteration on the reduced gradient. The step solves
/// (|H| + lambda) p = -g in the eigenbasis of H, keeping the sign of each
/// eigenvalue so saddles are approached as well as minima; directions with
/// |mu| below 1e-12 max|mu| (continuous symmetries) are left untouched.
inline OptimizedPoint newton_refine(const LoopAction& A, Vector z, const NewtonOptions& opts = {}) {
  OptimizedPoint out;
  OptimizationReport& rep = out.report;
  auto cur = detail::try_evaluate(A, z);
  if (!cur) fail(ErrorCode::CollisionalPath, "refinement start is collisional");
  if (cur->grad.norm() > opts.basin)
    fail(ErrorCode::NotInBasin, "gradient norm " + std::to_string(cur->grad.norm()) + " above basin threshold");
  detail::note_separation(A, z, rep);
  double lambda = opts.lambda0;
  int it = 0;
  while (cur->grad.norm() > opts.tol && it < opts.max_iter) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(A.hessian(z));
    if (es.info() != Eigen::Success) fail(ErrorCode::EigenFailure, "Hessian eigen-decomposition failed");
    const Vector& mu = es.eigenvalues();
    const double cut = 1e-12 * mu.cwiseAbs().maxCoeff();
    const Vector gv = es.eigenvectors().transpose() * cur->grad;
    bool accepted = false;
    while (!accepted) {
      Vector pv = Vector::Zero(mu.size());
      for (Eigen::Index i = 0; i < mu.size(); ++i)
        if (std::abs(mu[i]) > cut) pv[i] = -gv[i] / (mu[i] + std::copysign(lambda, mu[i]));
      const Vector trial = z + es.eigenvectors() * pv;
      auto next = detail::try_evaluate(A, trial);
      if (next && next->grad.norm() < cur->grad.norm()) {
        z = trial;
        cur = std::move(next);
        lambda = std::max(lambda / 10.0, 1e-16);
        accepted = true;
      } else {
        lambda *= 10.0;
        if (lambda > opts.lambda_max) fail(ErrorCode::SingularHessian, "Newton damping exceeded 1e4");
      }
    }
    ++it;
    detail::note_separation(A, z, rep);
  }
  rep.method_trace.push_back({"newton", it, cur->grad.norm()});
  out.z = std::move(z);
  rep.action_value = cur->value;
  rep.gradient_norm = cur->grad.norm();
  rep.iterations = it;
  if (rep.gradient_norm > opts.tol) rep.error = ErrorCode::MaxIterations;
  return out;
}

inline void merge_reports(OptimizationReport& into, const OptimizationReport& stage) {
  into.action_value = stage.action_value;
  into.gradient_norm = stage.gradient_norm;
  into.iterations += stage.iterations;
  into.method_trace.insert(into.method_trace.end(), stage.method_trace.begin(), stage.method_trace.end());
  into.min_separation_seen = std::min(into.min_separation_seen, stage.min_separation_seen);
  into.collision_flag = into.collision_flag || stage.collision_flag;
  into.error = stage.error;
}

/// Descent followed by Newton refinement when the basin is reached.
inline OptimizedPoint solve_from(const LoopAction& A, Vector z0, double tol = 1e-10, const MinimizeOptions& mo = {}) {
  OptimizedPoint out;
  out.z = std::move(z0);
  const auto first = detail::try_evaluate(A, out.z);
  if (!first) fail(ErrorCode::CollisionalPath, "initial point is collisional");
  if (first->grad.norm() > mo.tol_fo) {
    OptimizedPoint m = minimize(A, out.z, mo);
    out.z = std::move(m.z);
    merge_reports(out.report, m.report);
  } else {
    out.report.action_value = first->value;
    out.report.gradient_norm = first->grad.norm();
  }
  NewtonOptions no;
  no.tol = tol;
  if (out.report.gradient_norm <= no.basin && out.report.gradient_norm > tol) {
    OptimizedPoint n = newton_refine(A, out.z, no);
    out.z = std::move(n.z);
    merge_reports(out.report, n.report);
  } else if (out.report.gradient_norm > tol) {
    out.report.error = ErrorCode::MaxIterations;
  }
  if (out.report.min_separation_seen == std::numeric_limits<double>::infinity())
    detail::note_separation(A, out.z, out.report);
  return out;
}

/// Worker count: hardware concurrency capped by EQUISTAB_THREADS.
inline int worker_count(int jobs) {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("EQUISTAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return std::max(1, std::min(n, jobs));
}

/// Independent starts with seeds seed, seed + 1, ...; results ordered by
/// (action value, gradient norm). Starts that hit a collision are dropped.
inline std::vector<OptimizedPoint> multistart(const LoopAction& A, std::uint64_t seed, int starts, double tol = 1e-10,
                                              const MinimizeOptions& mo = {}) {
  std::vector<std::optional<OptimizedPoint>> slots(static_cast<std::size_t>(starts));
  const int workers = worker_count(starts);
  auto run = [&](int w) {
    for (int s = w; s < starts; s += workers) {
      const std::uint64_t sd = seed + static_cast<std::uint64_t>(s);
      try {
        OptimizedPoint p = solve_from(A, random_init(A, sd), tol, mo);
        p.report.seed = sd;
        slots[static_cast<std::size_t>(s)] = std::move(p);
      } catch (const Error&) {
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  std::vector<OptimizedPoint> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  std::stable_sort(out.begin(), out.end(), [](const OptimizedPoint& a, const OptimizedPoint& b) {
    if (a.report.converged() != b.report.converged()) return a.report.converged();
    if (a.report.action_value != b.report.action_value) return a.report.action_value < b.report.action_value;
    return a.report.gradient_norm < b.report.gradient_norm;
  });
  return out;
}

}  // namespace equistab
