#pragma once

// Benchmark table for one orbit, and trajectory export (CSV, SVG).

#include <cstdio>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

#include "equistab/floquet.hpp"
#include "equistab/io.hpp"
#include "equistab/morse.hpp"

namespace equistab {

namespace detail {

inline std::string fmt(double v, int prec = 4, bool fixed = true) {
  std::ostringstream os;
  if (fixed) os << std::fixed;
  os << std::setprecision(prec) << v;
  return os.str();
}

inline std::string sci(double v, int prec = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", prec, v);
  return buf;
}

inline std::string rho_string(const Matrix& rho) {
  const int d = static_cast<int>(rho.rows());
  if (rho.isIdentity(1e-12)) return "Id";
  if ((rho + Matrix::Identity(d, d)).isZero(1e-12)) return "-Id";
  if (d == 2 && std::abs(rho.determinant() - 1.0) < 1e-10) {
    const double th = std::atan2(rho(1, 0), rho(0, 0));
    for (int q = 1; q <= 24; ++q) {
      const double p = th / M_PI * q;
      if (std::abs(p - std::round(p)) > 1e-9) continue;
      const long k = std::lround(p);
      const std::string num = k == 1 ? "pi" : k == -1 ? "-pi" : std::to_string(k) + "pi";
      return "R(" + num + (q == 1 ? "" : "/" + std::to_string(q)) + ")";
    }
    return "R(" + fmt(th, 6, false) + ")";
  }
  std::ostringstream os;
  os << '[';
  for (int r = 0; r < d; ++r) {
    os << (r ? "; " : "");
    for (int c = 0; c < d; ++c) os << (c ? " " : "") << fmt(rho(r, c), 4, false);
  }
  os << ']';
  return os.str();
}

inline std::string element_label(const GroupElement& g, std::size_t idx) {
  return g.name.empty() ? "g" + std::to_string(idx + 1) : g.name;
}

}  // namespace detail

struct ReportTable {
  std::vector<std::string> generator_lines;
  double action = 0.0;
  double gradient_norm = 0.0;
  MorseResult morse_fundamental;
  MorseResult morse_period;
  MonodromyResult floquet;
  StabilityVerdict verdict;

  std::string text() const {
    auto neg = [](const MorseResult& m) {
      if (!m.max_negative) return std::string("---");
      return std::abs(*m.max_negative) < 1e-3 ? detail::sci(*m.max_negative, 4) : detail::fmt(*m.max_negative);
    };
    std::ostringstream os;
    const int w = 24;
    for (std::size_t i = 0; i < generator_lines.size(); ++i)
      os << std::left << std::setw(w) << (i == 0 ? "Group generator(s)" : "") << generator_lines[i] << '\n';
    os << std::left << std::setw(w) << "Action value" << detail::fmt(action) << '\n';
    os << std::left << std::setw(w) << "Gradient norm" << detail::sci(gradient_norm) << '\n';
    os << std::left << std::setw(w) << "Morse (fund. domain)" << "Index " << morse_fundamental.index << '\n';
    os << std::left << std::setw(w) << "" << "Max negative eigenvalue " << neg(morse_fundamental) << '\n';
    os << std::left << std::setw(w) << "Morse (period)" << "Index " << morse_period.index << '\n';
    os << std::left << std::setw(w) << "" << "Max negative eigenvalue " << neg(morse_period) << '\n';
    os << std::left << std::setw(w) << "Floquet" << "Norm of the max eigenvalue "
       << (floquet.max_modulus >= 1e4 ? detail::sci(floquet.max_modulus, 4) : detail::fmt(floquet.max_modulus)) << '\n';
    os << std::left << std::setw(w) << "" << (verdict.stable ? "stable" : "unstable") << " (tol 0.05)\n";
    return os.str();
  }
};

inline Json morse_json(const MorseResult& m) {
  Json j;
  j["domain"] = to_string(m.domain);
  j["index"] = m.index;
  j["max_negative"] = m.max_negative ? Json(*m.max_negative) : Json(nullptr);
  j["near_zero_count"] = m.near_zero_count;
  j["eps_zero"] = m.eps_zero;
  j["eps_relative"] = m.eps_relative;
  j["max_abs_eigenvalue"] = m.max_abs_eigenvalue;
  if (m.domain == MorseDomain::period) {
    j["grid"] = m.grid;
    j["refined_residual"] = m.refined_residual;
    j["solver"] = m.dense ? "dense-eigen" : "ldlt-inertia";
  }
  return j;
}

inline Json floquet_json(const MonodromyResult& m, const StabilityVerdict& v) {
  Json j;
  j["mode"] = m.mode == MonodromyMode::analytic ? "analytic" : "shooting";
  j["steps"] = m.steps;
  j["max_modulus"] = m.max_modulus;
  j["log10_max_modulus"] = m.log10_max_modulus;
  j["rescaled"] = m.rescaled;
  j["det_residual"] = m.det_residual;
  j["symplectic_residual"] = m.symplectic_residual;
  j["pairing_residual"] = m.pairing_residual;
  Json mult = Json::array();
  for (const auto& z : m.multipliers) mult.push_back({z.real(), z.imag()});
  j["multipliers"] = mult;
  j["verdict"] = v.stable ? "stable" : "unstable";
  j["margin"] = v.margin;
  return j;
}

inline Json report_json(const ReportTable& r) {
  Json j;
  j["group"] = r.generator_lines;
  j["action"] = r.action;
  j["gradient_norm"] = r.gradient_norm;
  j["morse_fundamental"] = morse_json(r.morse_fundamental);
  j["morse_period"] = morse_json(r.morse_period);
  j["floquet"] = floquet_json(r.floquet, r.verdict);
  return j;
}

/// Pretty group description in the style "ker tau = <k>, G/ker tau = <r>".
inline std::vector<std::string> describe_group(const ProblemFile& p) {
  auto names = [](const std::vector<GroupElement>& v, std::size_t offset) {
    if (v.empty()) return std::string("Id");
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + detail::element_label(v[i], offset + i);
    return s;
  };
  std::vector<std::string> lines;
  lines.push_back("ker tau = <" + names(p.kernel, 0) + ">, G/ker tau = <" + names(p.generators, p.kernel.size()) + ">");
  std::size_t idx = 0;
  for (const auto* list : {&p.kernel, &p.generators})
    for (const auto& g : *list) {
      const std::string nm = detail::element_label(g, idx++);
      lines.push_back("rho(" + nm + ") = " + detail::rho_string(g.rho) + ", sigma(" + nm + ") = " + cycle_notation(g.sigma) +
                      ", tau(" + nm + ") = " + g.tau.to_string());
    }
  return lines;
}

struct ReportOptions {
  int steps = 8192;
  MonodromyMode mode = MonodromyMode::analytic;
  int grid = 0;  // 0: the problem's M
  double eps_relative = 1e-8;
  double stability_tol = 0.05;
};

inline ReportTable build_report(const OrbitFile& orbit, const ReportOptions& opts = {}) {
  const ProblemSpec& spec = orbit.problem.spec;
  const LoopAction A(spec);
  const TrigLoop loop = orbit.loop();
  const Vector z = A.reduce(loop);
  const TrigLoop sym = A.loop(z);
  ReportTable r;
  r.generator_lines = describe_group(orbit.problem);
  r.action = A.value(z);
  r.gradient_norm = A.gradient(z).norm();
  r.morse_fundamental = morse_fundamental(A, z, opts.eps_relative);
  r.morse_period = morse_period(sym, spec, opts.grid > 0 ? opts.grid : spec.disc().M, opts.eps_relative);
  r.floquet = monodromy(sym, spec, {opts.mode, opts.steps, false});
  r.verdict = stability_verdict(r.floquet, opts.stability_tol);
  return r;
}

// ---- export -------------------------------------------------------------------

inline std::string export_csv(const TrigLoop& loop, int Q) {
  if (Q < 2) fail(ErrorCode::SchemaError, "need at least two samples");
  std::ostringstream os;
  os << "t,body";
  for (int c = 0; c < loop.dim(); ++c) os << ",x" << c + 1;
  os << '\n' << std::setprecision(17);
  for (int q = 0; q < Q; ++q) {
    const double t = q * loop.period() / Q;
    const Vector x = loop.position(t);
    for (int i = 0; i < loop.bodies(); ++i) {
      os << t << ',' << i + 1;
      for (int c = 0; c < loop.dim(); ++c) os << ',' << x[i * loop.dim() + c];
      os << '\n';
    }
  }
  return os.str();
}

/// One closed polyline per body; 3-d loops are projected orthographically
/// onto the plane named by two axis letters ("xy", "xz", "yz").
inline std::string export_svg(const TrigLoop& loop, int Q, const std::string& plane = "xy") {
  if (Q < 2) fail(ErrorCode::SchemaError, "need at least two samples");
  if (plane.size() != 2 || plane.find_first_not_of("xyz") != std::string::npos || plane[0] == plane[1])
    fail(ErrorCode::SchemaError, "plane must be two distinct axes among x, y, z");
  const int a = plane[0] - 'x', b = plane[1] - 'x';
  const int d = loop.dim();
  if (a >= d || b >= d) fail(ErrorCode::SchemaError, "plane axis exceeds the space dimension");
  const int n = loop.bodies();
  std::vector<std::vector<std::pair<double, double>>> pts(static_cast<std::size_t>(n));
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (int q = 0; q <= Q; ++q) {
    const Vector x = loop.position(q == Q ? 0.0 : q * loop.period() / Q);
    for (int i = 0; i < n; ++i) {
      const double u = x[i * d + a], v = -x[i * d + b];
      pts[static_cast<std::size_t>(i)].emplace_back(u, v);
      x0 = std::min(x0, u), x1 = std::max(x1, u), y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
  }
  const double side = std::max({x1 - x0, y1 - y0, 1e-12});
  const double pad = 0.05 * side;
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  const double half = 0.5 * side + pad;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream os;
  os << std::setprecision(10);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << cx - half << ' ' << cy - half << ' ' << 2 * half << ' ' << 2 * half
     << "\" width=\"600\" height=\"600\">\n";
  for (int i = 0; i < n; ++i) {
    os << "  <polyline fill=\"none\" stroke=\"" << colors[i % 8] << "\" stroke-width=\"" << side / 300 << "\" points=\"";
    for (const auto& [u, v] : pts[static_cast<std::size_t>(i)]) os << u << ',' << v << ' ';
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline std::string export_json(const TrigLoop& loop, int Q) {
  if (Q < 2) fail(ErrorCode::SchemaError, "need at least two samples");
  Json rows = Json::array();
  for (int q = 0; q < Q; ++q) {
    const double t = q * loop.period() / Q;
    const Vector x = loop.position(t);
    for (int i = 0; i < loop.bodies(); ++i)
      rows.push_back({{"t", t}, {"body", i + 1}, {"x", std::vector<double>(x.data() + i * loop.dim(), x.data() + (i + 1) * loop.dim())}});
  }
  return Json({{"samples", Q}, {"period", loop.period()}, {"rows", rows}}).dump(2) + "\n";
}

inline std::string export_plot(const TrigLoop& loop, int Q, const std::string& format, const std::string& plane = "xy") {
  if (format == "csv") return export_csv(loop, Q);
  if (format == "json") return export_json(loop, Q);
  if (format == "svg") return export_svg(loop, Q, plane);
  fail(ErrorCode::UnsupportedFormat, "unsupported export format '" + format + "'");
}

}  // namespace equistab
