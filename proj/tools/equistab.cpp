// equistab: find symmetric periodic n-body orbits and their stability indicators.

#include <CLI11.hpp>

#include <iostream>

#include "equistab.hpp"

using namespace equistab;

namespace {

struct Common {
  std::string format = "text";
};

void emit(const Json& j, const std::string& text, const Common& c) {
  if (c.format == "json") std::cout << j.dump(2) << '\n';
  else std::cout << text;
}

OrbitFile load_orbit(const std::string& path) {
  InputFile in = parse_input(read_text(path));
  if (!in.orbit) fail(ErrorCode::SchemaError, path + ": expected an orbit file");
  return std::move(*in.orbit);
}

int run_solve(const std::string& path, std::uint64_t seed, int starts, double tol, const std::string& out, const Common& c) {
  const InputFile in = parse_input(read_text(path));
  const ProblemSpec& spec = in.problem.spec;
  const LoopAction A(spec);
  OptimizedPoint best;
  if (in.orbit) {
    best = solve_from(A, A.reduce(in.orbit->loop(spec.disc().K)), tol);
    best.report.seed = seed;
  } else {
    auto all = multistart(A, seed, starts, tol);
    if (all.empty()) fail(ErrorCode::CollisionStall, "every start ended in a collision");
    best = std::move(all.front());
  }
  const OptimizationReport& r = best.report;
  OrbitFile orbit = make_orbit(in.problem, A.loop(best.z));
  orbit.provenance = {{"seed", in.orbit ? Json(nullptr) : Json(r.seed)},
                      {"starts", in.orbit ? 0 : starts},
                      {"seed_orbit", in.orbit ? Json(in.orbit->provenance.value("source", std::string("orbit file"))) : Json(nullptr)},
                      {"tolerances", {{"first_order", MinimizeOptions{}.tol_fo}, {"newton", tol}}},
                      {"tool_version", kToolVersion}};
  orbit.indicators = {{"action", r.action_value}, {"gradient_norm", r.gradient_norm}};
  if (!out.empty()) write_text(out, serialize_orbit(orbit));

  Json j = {{"action", r.action_value},
            {"gradient_norm", r.gradient_norm},
            {"iterations", r.iterations},
            {"seed", in.orbit ? Json(nullptr) : Json(r.seed)},
            {"min_separation_seen", r.min_separation_seen},
            {"collision_flag", r.collision_flag},
            {"converged", r.converged()}};
  Json trace = Json::array();
  for (const auto& m : r.method_trace) trace.push_back({{"method", m.method}, {"iterations", m.iterations}, {"final_norm", m.final_norm}});
  j["method_trace"] = trace;
  std::ostringstream os;
  os << "action " << detail::fmt(r.action_value, 10) << "\ngradient norm " << detail::sci(r.gradient_norm) << "\niterations " << r.iterations
     << '\n';
  if (!in.orbit) os << "seed " << r.seed << '\n';
  for (const auto& m : r.method_trace) os << "  " << m.method << ": " << m.iterations << " iterations, |grad| " << detail::sci(m.final_norm) << '\n';
  if (!out.empty()) os << "wrote " << out << '\n';
  emit(j, os.str(), c);
  if (!r.converged()) fail(*r.error, "gradient norm " + detail::sci(r.gradient_norm) + " above tolerance " + detail::sci(tol));
  return 0;
}

int run_floquet(const std::string& path, int steps, const std::string& mode, double tol, const Common& c) {
  const OrbitFile orbit = load_orbit(path);
  const LoopAction A(orbit.problem.spec);
  const TrigLoop loop = A.loop(A.reduce(orbit.loop()));
  const MonodromyResult m = monodromy(loop, orbit.problem.spec, {mode == "shooting" ? MonodromyMode::shooting : MonodromyMode::analytic, steps, false});
  const StabilityVerdict v = stability_verdict(m, tol);
  std::ostringstream os;
  os << "max modulus " << detail::fmt(m.max_modulus, 6) << " (" << (v.stable ? "stable" : "unstable") << ", tol " << tol << ")\n"
     << "det residual " << detail::sci(m.det_residual) << "\nsymplectic residual " << detail::sci(m.symplectic_residual)
     << "\npairing residual " << detail::sci(m.pairing_residual) << "\nmultipliers\n";
  for (const auto& z : m.multipliers) os << "  " << detail::fmt(z.real(), 8) << (z.imag() < 0 ? " - " : " + ") << detail::fmt(std::abs(z.imag()), 8) << "i   |" << detail::fmt(std::abs(z), 8) << "|\n";
  emit(floquet_json(m, v), os.str(), c);
  return 0;
}

int run_morse(const std::string& path, const std::string& domain, int grid, const std::string& eps, const Common& c) {
  const OrbitFile orbit = load_orbit(path);
  const ProblemSpec& spec = orbit.problem.spec;
  double rel = 1e-8;
  if (eps != "auto") {
    try {
      rel = std::stod(eps);
    } catch (const std::exception&) {
      fail(ErrorCode::SchemaError, "--eps-zero expects 'auto' or a number");
    }
  }
  const LoopAction A(spec);
  const Vector z = A.reduce(orbit.loop());
  Json j = Json::object();
  std::ostringstream os;
  auto show = [&](const MorseResult& m) {
    j[to_string(m.domain)] = morse_json(m);
    os << to_string(m.domain) << ": index " << m.index << ", max negative "
       << (m.max_negative ? detail::fmt(*m.max_negative, 6) : std::string("---")) << ", near-zero " << m.near_zero_count << " (eps "
       << detail::sci(m.eps_zero) << ")\n";
  };
  if (domain == "fundamental" || domain == "both") show(morse_fundamental(A, z, rel));
  if (domain == "period" || domain == "both") show(morse_period(A.loop(z), spec, grid > 0 ? grid : spec.disc().M, rel));
  emit(j, os.str(), c);
  return 0;
}

int run_report(const std::string& path, int steps, int grid, const Common& c) {
  ReportOptions o;
  o.steps = steps;
  o.grid = grid;
  const ReportTable r = build_report(load_orbit(path), o);
  emit(report_json(r), r.text(), c);
  return 0;
}

int run_export(const std::string& path, int samples, const std::string& format, const std::string& out, const std::string& plane) {
  const OrbitFile orbit = load_orbit(path);
  const std::string bytes = export_plot(orbit.loop(), samples, format, plane);
  if (out.empty()) std::cout << bytes;
  else write_text(out, bytes);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric periodic orbits of the n-body problem and their stability"};
  app.require_subcommand(1);
  Common common;
  auto add_format = [&](CLI::App* sub) { sub->add_option("--format", common.format, "output format")->check(CLI::IsMember({"text", "json"})); };

  std::string file, out, mode = "analytic", domain = "both", eps = "auto", xformat, plane = "xy";
  std::uint64_t seed = 7;
  int starts = 1, steps = 8192, grid = 0, samples = 0;
  double tol = 1e-10, ftol = 0.05;

  auto* solve = app.add_subcommand("solve", "locate a critical point of the equivariant action");
  solve->add_option("problem", file, "problem or seed orbit file")->required();
  solve->add_option("--seed", seed, "random seed of the first start");
  solve->add_option("--starts", starts, "number of random starts")->check(CLI::PositiveNumber);
  solve->add_option("--tol", tol, "final gradient-norm tolerance");
  solve->add_option("--out", out, "orbit file to write");
  add_format(solve);

  auto* floq = app.add_subcommand("floquet", "monodromy matrix and Floquet multipliers");
  floq->add_option("orbit", file)->required();
  floq->add_option("--steps", steps, "RK4 steps per period")->check(CLI::PositiveNumber);
  floq->add_option("--mode", mode)->check(CLI::IsMember({"analytic", "shooting"}));
  floq->add_option("--stability-tol", ftol, "stable iff max modulus <= 1 + tol");
  add_format(floq);

  auto* morse = app.add_subcommand("morse", "discrete Morse indices");
  morse->add_option("orbit", file)->required();
  morse->add_option("--domain", domain)->check(CLI::IsMember({"fundamental", "period", "both"}));
  morse->add_option("--grid", grid, "period grid size M");
  morse->add_option("--eps-zero", eps, "relative zero threshold or 'auto' (1e-8)");
  add_format(morse);

  auto* report = app.add_subcommand("report", "benchmark table for an orbit");
  report->add_option("orbit", file)->required();
  report->add_option("--steps", steps)->check(CLI::PositiveNumber);
  report->add_option("--grid", grid);
  add_format(report);

  auto* exp = app.add_subcommand("export", "sample the trajectory as CSV or SVG");
  exp->add_option("orbit", file)->required();
  exp->add_option("--samples", samples, "samples per period")->required();
  exp->add_option("--format", xformat, "csv, svg or json")->required();
  exp->add_option("--out", out);
  exp->add_option("--plane", plane, "projection plane for 3-d orbits");

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    std::cerr << "error[Usage]: unknown subcommand '" << argv[1] << "'\n" << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[Usage]: " << e.what() << '\n' << app.help();
    return 1;
  }

  try {
    if (*solve) return run_solve(file, seed, starts, tol, out, common);
    if (*floq) return run_floquet(file, steps, mode, ftol, common);
    if (*morse) return run_morse(file, domain, grid, eps, common);
    if (*report) return run_report(file, steps, grid, common);
    if (*exp) return run_export(file, samples, xformat, out, plane);
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.code()) << "]: " << e.message() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error[Internal]: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
