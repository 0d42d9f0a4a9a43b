#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "equistab/report.hpp"
#include "helpers.hpp"

using namespace equistab;
using namespace testing_support;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::IoError;
}

std::vector<std::vector<std::pair<double, double>>> svg_polylines(const std::string& svg) {
  std::vector<std::vector<std::pair<double, double>>> out;
  const std::regex poly("points=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it) {
    std::istringstream is((*it)[1].str());
    std::vector<std::pair<double, double>> pts;
    double u, v;
    char comma;
    while (is >> u >> comma >> v) pts.emplace_back(u, v);
    out.push_back(std::move(pts));
  }
  return out;
}

}  // namespace

TEST(ParseProblem, Minimal) {
  const ProblemFile p = parse_problem(R"({"n": 2, "d": 2})");
  EXPECT_EQ(p.spec.bodies(), 2);
  EXPECT_EQ(p.spec.group().order(), 1);
  EXPECT_EQ(p.spec.masses(), (std::vector<double>{1.0, 1.0}));
}

TEST(ParseProblem, LagrangeFixture) {
  const ProblemFile p = parse_problem(read_text(fixture_path("lagrange3.json")));
  EXPECT_EQ(p.spec.group().order(), 2);
  EXPECT_EQ(p.spec.quotient_order(), 2);
  EXPECT_DOUBLE_EQ(p.spec.period(), 2 * M_PI);
}

TEST(ParseProblem, Errors) {
  EXPECT_EQ(code_of([] { parse_problem(R"({"n": 2, "d": 2, "masses": [1, 2],
      "group": {"generators": [{"rho": [1, 0, 0, 1], "sigma": [2, 1], "tau": {"kind": "rotation", "num": 1, "den": 2}}]}})"); }),
            ErrorCode::MassOrbitMismatch);
  EXPECT_EQ(code_of([] { parse_problem("{ not json"); }), ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { parse_problem(R"({"n": 3})"); }), ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { parse_problem(R"({"n": 2, "d": 4})"); }), ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { parse_problem(R"({"n": 2, "d": 2, "group": {"generators": [{"rho": [1, 1, 0, 1]}]}})"); }),
            ErrorCode::NonOrthogonalRho);
}

TEST(OrbitFile, BitwiseRoundTrip) {
  for (const char* name : {"lagrange3.json", "euler3.json", "eight3.json", "fig4.json"}) {
    const OrbitFile o = load_fixture(name);
    const std::string text = serialize_orbit(o);
    const OrbitFile back = parse_orbit(text);
    EXPECT_EQ(std::memcmp(back.coefficients.data(), o.coefficients.data(), sizeof(double) * o.coefficients.size()), 0) << name;
    EXPECT_EQ(serialize_orbit(back), text) << name;
  }
  // arbitrary bit patterns survive as well
  std::mt19937_64 rng(5);
  OrbitFile o = make_orbit(parse_problem(R"({"n": 2, "d": 2})"), kepler_loop(4));
  o.problem = parse_problem(R"({"n": 2, "d": 2, "group": {"generators": [{"rho": [-1, 0, 0, -1], "sigma": [1, 2]}],
                                                           "preset": {"kind": "cyclic", "l": 2}}})");
  o.period = 2 * M_PI;
  std::uniform_real_distribution<double> U(-1e3, 1e3);
  for (auto& v : o.coefficients) v = U(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
  const OrbitFile back = parse_orbit(serialize_orbit(o));
  EXPECT_EQ(std::memcmp(back.coefficients.data(), o.coefficients.data(), sizeof(double) * o.coefficients.size()), 0);
}

TEST(OrbitFile, SchemaChecks) {
  std::string text = serialize_orbit(load_fixture("lagrange3.json"));
  EXPECT_EQ(code_of([&] { parse_orbit(std::regex_replace(text, std::regex("\"period\": [0-9.e+-]+"), "\"period\": 3.0")); }),
            ErrorCode::SchemaError);
  EXPECT_EQ(code_of([&] { parse_orbit(std::regex_replace(text, std::regex("\"version\": 1"), "\"version\": 2")); }),
            ErrorCode::SchemaError);
  EXPECT_EQ(code_of([&] { parse_orbit(std::regex_replace(text, std::regex("\"order\": 32"), "\"order\": 31")); }),
            ErrorCode::SchemaError);
}

TEST(OrbitFile, SamplesSeedFitsTheEight) {
  const OrbitFile seed = load_fixture("eight3_seed.json");
  EXPECT_EQ(seed.representation, "samples");
  const TrigLoop loop = seed.loop();
  EXPECT_EQ(loop.order(), seed.problem.spec.disc().K);
  // a 12-point trace rounded to 3 decimals is close to, not exactly, equivariant
  EXPECT_LE(check_equivariance(loop, seed.problem.spec.group()), 0.05);
}

TEST(Export, CsvRowCount) {
  TrigLoop still(2, 2, 1, 2 * M_PI);
  still.mode_block(0) << -0.5, 0, 0.5, 0;
  const std::string csv = export_plot(still, 4, "csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4 * 2 + 1);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,body,x1,x2");
  const OrbitFile lag = load_fixture("lagrange3.json");
  const std::string c3 = export_csv(lag.loop(), 50);
  EXPECT_EQ(std::count(c3.begin(), c3.end(), '\n'), 50 * 3 + 1);
}

TEST(Export, SvgClosedPolylines) {
  const std::string svg = export_svg(load_fixture("lagrange3.json").loop(), 64);
  const auto lines = svg_polylines(svg);
  ASSERT_EQ(lines.size(), 3u);
  for (const auto& pts : lines) {
    ASSERT_EQ(pts.size(), 65u);
    EXPECT_NEAR(pts.front().first, pts.back().first, 1e-6);
    EXPECT_NEAR(pts.front().second, pts.back().second, 1e-6);
  }
  EXPECT_NE(svg.find("viewBox"), std::string::npos);
}

TEST(Export, EightIsAChoreography) {
  const auto lines = svg_polylines(export_svg(load_fixture("eight3.json").loop(), 300));
  ASSERT_EQ(lines.size(), 3u);
  auto set_distance = [](const auto& a, const auto& b) {
    double worst = 0.0;
    for (const auto& p : a) {
      double best = 1e300;
      for (const auto& q : b) best = std::min(best, std::hypot(p.first - q.first, p.second - q.second));
      worst = std::max(worst, best);
    }
    return worst;
  };
  EXPECT_LE(set_distance(lines[0], lines[1]), 1e-3);
  EXPECT_LE(set_distance(lines[0], lines[2]), 1e-3);
  EXPECT_LE(set_distance(lines[2], lines[0]), 1e-3);
}

TEST(Export, ThreeDimensionalPlanes) {
  TrigLoop loop(2, 3, 1, 2 * M_PI);
  loop.mode_block(1) << 1, 0, 0.5, -1, 0, -0.5;
  loop.mode_block(2) << 0, 1, 0, 0, -1, 0;
  EXPECT_EQ(svg_polylines(export_svg(loop, 16, "xz")).size(), 2u);
  EXPECT_EQ(code_of([&] { export_svg(loop, 16, "xx"); }), ErrorCode::SchemaError);
  EXPECT_EQ(code_of([&] { export_plot(loop, 16, "pdf"); }), ErrorCode::UnsupportedFormat);
}

TEST(Report, LagrangeTableIsStable) {
  const OrbitFile o = load_fixture("lagrange3.json");
  const ReportTable a = build_report(o), b = build_report(o);
  EXPECT_EQ(report_json(a).dump(), report_json(b).dump());
  const std::string text = a.text();
  EXPECT_NE(text.find("Action value            9.8022"), std::string::npos) << text;
  EXPECT_EQ(a.morse_fundamental.index, 0);
  EXPECT_EQ(a.morse_period.index, 0);
  EXPECT_NEAR(a.floquet.max_modulus, 85.02, 0.05 * 85.02);
  EXPECT_FALSE(a.verdict.stable);
  EXPECT_NE(text.find("rho(r) = -Id, sigma(r) = (), tau(r) = rotation 1/2"), std::string::npos);
}
