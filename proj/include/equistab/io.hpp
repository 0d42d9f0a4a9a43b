#pragma once

// Problem and orbit files (JSON). Floats are written in shortest round-trip
// form, so parse(serialize(x)) reproduces every coefficient bit for bit.
//
// Problem:
//   { "n": 3, "d": 2, "masses": [1, 1, 1],
//     "group": { "kernel": [ ...elements... ],
//                "generators": [ { "name": "r", "rho": [-1, 0, 0, -1],
//                                  "sigma": [1, 2, 3],
//                                  "tau": { "kind": "rotation", "num": 1, "den": 2 } } ],
//                "preset": { "kind": "cyclic", "l": 2 } },
//     "discretization": { "K": 32, "F": 32, "M": 256, "min_separation": 1e-6 } }
// rho is row-major, sigma is one-line 1-based, tau defaults to the identity.
// A preset (cyclic | dihedral | brake) overrides tau of the generators.
//
// Orbit:
//   { "format": "equistab-orbit", "version": 1, "problem": {...},
//     "representation": "trig" | "fundamental" | "samples",
//     "period": T, "order": K | F | nodes, "coefficients": [...],
//     "provenance": {...}, "indicators": {...} }
// "samples" holds a coarse uniform trace x(kT/S), k < S, used only as a seed.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

#include "equistab/equivariance.hpp"

namespace equistab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOrbitFormat = "equistab-orbit";

namespace detail {

template <class T>
T field(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::SchemaError, ctx + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::SchemaError, ctx + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
T field_or(const Json& j, const char* key, T fallback, const std::string& ctx) {
  return j.contains(key) ? field<T>(j, key, ctx) : fallback;
}

inline GroupElement parse_element(const Json& j, int n, int d, const std::string& ctx) {
  GroupElement g;
  g.name = field_or<std::string>(j, "name", "", ctx);
  const auto rho = field<std::vector<double>>(j, "rho", ctx);
  if (static_cast<int>(rho.size()) != d * d) fail(ErrorCode::SchemaError, ctx + ": rho must have d*d entries");
  g.rho.resize(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g.rho(r, c) = rho[static_cast<std::size_t>(r * d + c)];
  const auto sigma = field_or<std::vector<int>>(j, "sigma", {}, ctx);
  if (sigma.empty()) {
    g.sigma = identity_permutation(n);
  } else {
    if (static_cast<int>(sigma.size()) != n) fail(ErrorCode::SchemaError, ctx + ": sigma must list n images");
    for (int v : sigma) g.sigma.push_back(v - 1);
    if (!is_bijection(g.sigma)) fail(ErrorCode::SchemaError, ctx + ": sigma is not a permutation of 1..n");
  }
  if (j.contains("tau")) {
    const Json& t = j.at("tau");
    const auto kind = field<std::string>(t, "kind", ctx + ".tau");
    const auto num = field<std::int64_t>(t, "num", ctx + ".tau");
    const auto den = field<std::int64_t>(t, "den", ctx + ".tau");
    if (den <= 0) fail(ErrorCode::SchemaError, ctx + ".tau: den must be positive");
    if (kind == "rotation") g.tau = TimeAction::rotation(num, den);
    else if (kind == "reflection") g.tau = TimeAction::reflection(num, den);
    else fail(ErrorCode::SchemaError, ctx + ".tau: kind must be rotation or reflection");
  }
  return g;
}

inline Json element_json(const GroupElement& g) {
  Json j;
  if (!g.name.empty()) j["name"] = g.name;
  std::vector<double> rho;
  for (int r = 0; r < g.rho.rows(); ++r)
    for (int c = 0; c < g.rho.cols(); ++c) rho.push_back(g.rho(r, c));
  j["rho"] = rho;
  std::vector<int> sigma;
  for (int v : g.sigma) sigma.push_back(v + 1);
  j["sigma"] = sigma;
  j["tau"] = {{"kind", g.tau.is_reflection() ? "reflection" : "rotation"}, {"num", g.tau.num()}, {"den", g.tau.den()}};
  return j;
}

}  // namespace detail

/// Problem definitions keep the generator lists they were built from so the
/// file can be written back and reports can name the generators.
struct ProblemFile {
  ProblemSpec spec;
  std::vector<GroupElement> kernel;
  std::vector<GroupElement> generators;
};

inline ProblemFile parse_problem_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::SchemaError, "problem: expected a JSON object");
  const int n = detail::field<int>(j, "n", "problem");
  const int d = detail::field<int>(j, "d", "problem");
  if (n < 2) fail(ErrorCode::SchemaError, "problem.n: need at least two bodies");
  if (d != 2 && d != 3) fail(ErrorCode::SchemaError, "problem.d: must be 2 or 3");
  auto masses = detail::field_or<std::vector<double>>(j, "masses", std::vector<double>(static_cast<std::size_t>(n), 1.0), "problem");
  if (static_cast<int>(masses.size()) != n) fail(ErrorCode::SchemaError, "problem.masses: expected n entries");

  std::vector<GroupElement> kernel, gens;
  if (j.contains("group")) {
    const Json& g = j.at("group");
    if (!g.is_object()) fail(ErrorCode::SchemaError, "problem.group: expected an object");
    int idx = 0;
    for (const auto& e : detail::field_or<Json>(g, "kernel", Json::array(), "problem.group"))
      kernel.push_back(detail::parse_element(e, n, d, "problem.group.kernel[" + std::to_string(idx++) + "]"));
    idx = 0;
    for (const auto& e : detail::field_or<Json>(g, "generators", Json::array(), "problem.group"))
      gens.push_back(detail::parse_element(e, n, d, "problem.group.generators[" + std::to_string(idx++) + "]"));
    for (auto& k : kernel) k.tau = TimeAction::identity();
    if (g.contains("preset")) {
      const Json& p = g.at("preset");
      const auto kind = detail::field<std::string>(p, "kind", "problem.group.preset");
      if (kind == "cyclic") presets::cyclic(gens, detail::field<int>(p, "l", "problem.group.preset"));
      else if (kind == "dihedral") presets::dihedral(gens, detail::field<int>(p, "l", "problem.group.preset"));
      else if (kind == "brake") presets::brake(gens);
      else fail(ErrorCode::SchemaError, "problem.group.preset.kind: expected cyclic, dihedral or brake");
    }
  }
  std::vector<GroupElement> all = kernel;
  all.insert(all.end(), gens.begin(), gens.end());
  SymmetryGroup group = build_group(all, n, d);

  Discretization disc;
  if (j.contains("discretization")) {
    const Json& dj = j.at("discretization");
    disc.K = detail::field_or<int>(dj, "K", disc.K, "problem.discretization");
    disc.F = detail::field_or<int>(dj, "F", disc.F, "problem.discretization");
    disc.M = detail::field_or<int>(dj, "M", disc.M, "problem.discretization");
    disc.min_separation = detail::field_or<double>(dj, "min_separation", disc.min_separation, "problem.discretization");
  }
  return {ProblemSpec(std::move(masses), d, std::move(group), disc), std::move(kernel), std::move(gens)};
}

inline ProblemFile parse_problem(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::SchemaError, std::string("invalid JSON: ") + e.what());
  }
  // an orbit file carries its problem
  if (j.is_object() && j.contains("format") && j.contains("problem")) return parse_problem_json(j.at("problem"));
  return parse_problem_json(j);
}

inline Json problem_json(const ProblemFile& p) {
  const ProblemSpec& s = p.spec;
  Json j;
  j["n"] = s.bodies();
  j["d"] = s.dim();
  j["masses"] = s.masses();
  Json g;
  g["kernel"] = Json::array();
  for (const auto& e : p.kernel) g["kernel"].push_back(detail::element_json(e));
  g["generators"] = Json::array();
  for (const auto& e : p.generators) g["generators"].push_back(detail::element_json(e));
  j["group"] = g;
  j["discretization"] = {{"K", s.disc().K}, {"F", s.disc().F}, {"M", s.disc().M}, {"min_separation", s.disc().min_separation}};
  return j;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

// ---- orbits -----------------------------------------------------------------

struct OrbitFile {
  ProblemFile problem;
  std::string representation = "trig";
  double period = 0.0;
  int order = 0;
  Vector coefficients;
  Json provenance = Json::object();
  Json indicators = Json::object();

  /// Canonical trigonometric loop of order K (defaults to the problem's K).
  TrigLoop loop(int K = 0) const {
    const ProblemSpec& s = problem.spec;
    if (K <= 0) K = s.disc().K;
    const int n = s.bodies(), d = s.dim();
    if (representation == "trig") return TrigLoop(n, d, order, period, coefficients).resized(K);
    if (representation == "fundamental") return unfold(FundamentalPath(n, d, order, coefficients), s.group(), K).loop;
    // samples: discrete Fourier fit of the highest order the trace supports
    const int S = order;
    const int nd = n * d;
    const int Kf = std::min(K, (S - 1) / 2);
    TrigLoop fit(n, d, Kf, period);
    for (int k = 0; k < S; ++k) {
      const auto x = coefficients.segment(k * nd, nd);
      fit.mode_block(0) += x / S;
      for (int m = 1; m <= Kf; ++m) {
        const double w = 2.0 * M_PI * m * k / S;
        fit.mode_block(TrigLoop::cos_mode(m)) += (2.0 / S) * std::cos(w) * x;
        fit.mode_block(TrigLoop::sin_mode(m)) += (2.0 / S) * std::sin(w) * x;
      }
    }
    return fit.resized(K);
  }
};

inline OrbitFile parse_orbit_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::SchemaError, "orbit: expected a JSON object");
  if (detail::field<std::string>(j, "format", "orbit") != kOrbitFormat) fail(ErrorCode::SchemaError, "orbit.format: not an orbit file");
  const int version = detail::field<int>(j, "version", "orbit");
  if (version != 1) fail(ErrorCode::SchemaError, "orbit.version: unsupported version " + std::to_string(version));
  OrbitFile o{parse_problem_json(detail::field<Json>(j, "problem", "orbit"))};
  o.representation = detail::field<std::string>(j, "representation", "orbit");
  o.period = detail::field<double>(j, "period", "orbit");
  o.order = detail::field<int>(j, "order", "orbit");
  const auto c = detail::field<std::vector<double>>(j, "coefficients", "orbit");
  o.coefficients = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
  const int nd = o.problem.spec.config_size();
  Eigen::Index expected = 0;
  if (o.representation == "trig") expected = static_cast<Eigen::Index>(2 * o.order + 1) * nd;
  else if (o.representation == "fundamental") expected = static_cast<Eigen::Index>(o.order + 2) * nd;
  else if (o.representation == "samples") expected = static_cast<Eigen::Index>(o.order) * nd;
  else fail(ErrorCode::SchemaError, "orbit.representation: expected trig, fundamental or samples");
  if (o.order < 1 || o.coefficients.size() != expected)
    fail(ErrorCode::SchemaError, "orbit.coefficients: expected " + std::to_string(expected) + " values");
  if (std::abs(o.period - o.problem.spec.period()) > 1e-12 * o.period)
    fail(ErrorCode::SchemaError, "orbit.period: does not equal l * pi for the problem's group");
  o.provenance = detail::field_or<Json>(j, "provenance", Json::object(), "orbit");
  o.indicators = detail::field_or<Json>(j, "indicators", Json::object(), "orbit");
  return o;
}

inline OrbitFile parse_orbit(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::SchemaError, std::string("invalid JSON: ") + e.what());
  }
  return parse_orbit_json(j);
}

inline Json orbit_json(const OrbitFile& o) {
  Json j;
  j["format"] = kOrbitFormat;
  j["version"] = 1;
  j["problem"] = problem_json(o.problem);
  j["representation"] = o.representation;
  j["period"] = o.period;
  j["order"] = o.order;
  j["coefficients"] = std::vector<double>(o.coefficients.data(), o.coefficients.data() + o.coefficients.size());
  j["provenance"] = o.provenance;
  if (!o.indicators.empty()) j["indicators"] = o.indicators;
  return j;
}

inline std::string serialize_orbit(const OrbitFile& o) { return orbit_json(o).dump(2) + "\n"; }

inline OrbitFile make_orbit(const ProblemFile& p, const TrigLoop& loop) {
  OrbitFile o{p};
  o.representation = "trig";
  o.period = loop.period();
  o.order = loop.order();
  o.coefficients = loop.coefficients();
  return o;
}

/// Either an orbit file or a bare problem file.
struct InputFile {
  ProblemFile problem;
  std::optional<OrbitFile> orbit;
};

inline InputFile parse_input(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::SchemaError, std::string("invalid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("format")) {
    OrbitFile o = parse_orbit_json(j);
    return {o.problem, std::move(o)};
  }
  return {parse_problem_json(j), std::nullopt};
}

}  // namespace equistab
