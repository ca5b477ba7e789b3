#include <cmath>
#include <random>

#include "doctest.h"
#include "newton/quotient.hpp"
#include "newton/singularities.hpp"

using namespace newton;
using namespace newton::singularities;
using functions::EntireFunction;
using functions::NewtonMap;
using functions::from_formula;

namespace {

functions::catalog::Params alpha1() {
  functions::catalog::Params p;
  p["alpha"] = "1";
  return p;
}

EntireFunction f_alpha1() {
  return std::get<EntireFunction>(functions::catalog::make("f_alpha", alpha1()));
}

Complex down_ray(double t) { return Complex(0.25, -t); }
Complex real_ray(double t) { return Complex(t, 0.0); }

}  // namespace

TEST_CASE("chart of exp(-z) is the identity") {
  auto f = from_formula("exp(-z)");
  LogChart chart = build_chart(f, real_ray, 0.5);
  CHECK(chart.eta() == doctest::Approx(std::log(2.0)));
  for (Complex w : {Complex(3, 0), Complex(5, 4), Complex(8, -6)}) {
    CHECK(std::abs(chart.psi(w) - w) <= 1e-12 * (1.0 + std::abs(w)));
    CHECK(chart.residual(w) <= 1e-9);
    ChartDefect d = chart.pushforward(w);
    CHECK(d.defect <= 1e-12);
  }
}

TEST_CASE("chart of exp(-z^2): sqrt branch and 1/(4w) defect") {
  auto f = from_formula("exp(-z^2)");
  LogChart chart = build_chart(f, real_ray, 0.5);
  // psi(4) = 2 on the branch anchored by the positive real ray
  CHECK(std::abs(chart.psi(Complex(4, 0)) - 2.0) <= 1e-10);
  // measured defect equals 1/(4|w|)
  for (Complex w : {Complex(1.0, 0.0), Complex(2, 0), Complex(10, 0), Complex(40, 25),
                    Complex(96, -20)}) {
    ChartDefect d = chart.pushforward(w);
    CHECK(std::abs(d.defect - 0.25 / std::abs(w)) <= 1e-6);
  }
  // exact pushforward value: G(w) = w + 1 + 1/(4w)
  ChartDefect d10 = chart.pushforward(Complex(10, 0));
  CHECK(std::abs(d10.G_w - Complex(11.025, 0)) <= 1e-9);
}

TEST_CASE("branch continuation without a global log") {
  // the same function presented without a usable global logarithm
  functions::catalog::Params p;
  p["p"] = "1";
  p["q"] = "-z^2";
  auto f = std::get<EntireFunction>(functions::catalog::make("poly_exp", p));
  REQUIRE_FALSE(f.has_log());
  LogChart chart = build_chart(f, real_ray, 0.5);
  CHECK(std::abs(chart.psi(Complex(4, 0)) - 2.0) <= 1e-9);
  ChartDefect d = chart.pushforward(Complex(10, 0));
  CHECK(std::abs(d.defect - 0.025) <= 1e-6);
  CHECK(chart.residual(Complex(7, 3)) <= 1e-9);
}

TEST_CASE("chart residual invariant for f_alpha") {
  LogChart chart = build_chart(f_alpha1(), down_ray, 0.2);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ur(chart.eta() + 1.0, chart.eta() + 15.0);
  std::uniform_real_distribution<double> ui(-10.0, 10.0);
  for (int k = 0; k < 100; ++k) {
    Complex w(ur(rng), ui(rng));
    CHECK(chart.residual(w) <= 1e-9);
  }
}

TEST_CASE("flow identity on chart samples") {
  struct Case {
    EntireFunction f;
    std::function<Complex(double)> ray;
    double r;
  };
  std::vector<Case> cases;
  cases.push_back({from_formula("exp(-z)"), real_ray, 0.5});
  cases.push_back({from_formula("exp(-z^2)"), real_ray, 0.5});
  cases.push_back({f_alpha1(), down_ray, 0.2});
  std::mt19937_64 rng(11);
  for (const auto& c : cases) {
    LogChart chart = build_chart(c.f, c.ray, c.r);
    std::uniform_real_distribution<double> ur(chart.eta() + 1.0, chart.eta() + 12.0);
    std::uniform_real_distribution<double> ui(-8.0, 8.0);
    for (int k = 0; k < 60; ++k) {
      Complex w(ur(rng), ui(rng));
      double h = 1e-4;
      Complex dpsi = (chart.psi(w + h) - chart.psi(w - h)) / (2.0 * h);
      Jet j = c.f.jet(chart.psi(w));
      CHECK(std::abs(dpsi + j.v / j.d) <= 1e-6);
    }
  }
}

TEST_CASE("find_eta0 on the exact translation chart") {
  auto f = from_formula("exp(-z)");
  LogChart chart = build_chart(f, real_ray, 0.5);
  Eta0Report rep = find_eta0(chart, chart.eta() + 5.0);
  REQUIRE(rep.found);
  CHECK(rep.eta0 == doctest::Approx(chart.eta()));  // defect identically 0
  CHECK(rep.max_defect <= 1e-12);
  CHECK(rep.min_re_drift >= 0.5);
}

TEST_CASE("find_eta0 for exp(-z^2) certifies below 1") {
  auto f = from_formula("exp(-z^2)");
  LogChart chart = build_chart(f, real_ray, 0.9);  // eta ~ 0.105
  Eta0Report rep = find_eta0(chart, chart.eta() + 4.0, 0.125);
  REQUIRE(rep.found);
  CHECK(rep.eta0 <= 1.0);
  CHECK(rep.max_defect < 0.5);
  CHECK(rep.min_re_drift >= 0.5);
}

TEST_CASE("find_eta0 for f_alpha: regression fixture") {
  LogChart chart = build_chart(f_alpha1(), down_ray, 0.2);
  Eta0Report rep = find_eta0(chart, chart.eta() + 10.0);
  REQUIRE(rep.found);
  CHECK(rep.eta0 == doctest::Approx(1.8594379124341003).epsilon(1e-12));
  CHECK(rep.max_defect == doctest::Approx(0.3994449174357762).epsilon(1e-6));
  CHECK(rep.min_re_drift >= 0.5);
}

TEST_CASE("find_eta0 reports failure instead of fabricating") {
  // exp(-z) chart restricted to an eta_max below the chart base cannot
  // produce any candidate
  auto f = from_formula("exp(-z)");
  LogChart chart = build_chart(f, real_ray, 0.5);
  Eta0Report rep = find_eta0(chart, chart.eta() - 1.0);
  CHECK_FALSE(rep.found);
}

TEST_CASE("probe_asymptotic along rays") {
  EntireFunction f = f_alpha1();
  // kind 1: 1/4 - it
  auto p1 = probe_asymptotic(f, down_ray, 20.0);
  CHECK(p1.verdict == AsymptoticProbe::Verdict::TendsToZero);
  CHECK(p1.samples.back().f_abs < 1e-8);
  // kind 2: the real axis
  auto p2 = probe_asymptotic(f, real_ray, 20.0);
  CHECK(p2.verdict == AsymptoticProbe::Verdict::TendsToZero);
  CHECK(p2.samples.back().f_abs < 1e-8);
  // e^{-z} along the negative real axis blows up: inconclusive
  auto f2 = from_formula("exp(-z)");
  auto p3 = probe_asymptotic(f2, [](double t) { return Complex(-t, 0); }, 20.0);
  CHECK(p3.verdict == AsymptoticProbe::Verdict::Inconclusive);
  CHECK(p3.samples.back().f_abs > 1.0);
}

TEST_CASE("probe_asymptotic detects finite nonzero limits") {
  // f = exp(-z) + 1 tends to 1 along the positive real axis
  auto f = from_formula("exp(-z) + 1");
  auto p = probe_asymptotic(f, real_ray, 40.0);
  CHECK(p.verdict == AsymptoticProbe::Verdict::TendsTo);
  CHECK(std::abs(p.limit - 1.0) <= 1e-6);
}

TEST_CASE("probe along an orbit") {
  auto f = from_formula("exp(-z)");
  auto N = NewtonMap::from_function(f);
  dynamics::IterationConfig cfg;
  cfg.max_iter = 60;
  auto rec = dynamics::iterate_orbit(N, Complex(0, 0), cfg);
  auto p = probe_asymptotic(f, rec);
  CHECK(p.path_kind == AsymptoticProbe::PathKind::Orbit);
  CHECK(p.verdict == AsymptoticProbe::Verdict::TendsToZero);
}

TEST_CASE("decay slopes") {
  // exact translation: slope exactly -1
  auto f = from_formula("exp(-z)");
  auto N = NewtonMap::from_function(f);
  dynamics::IterationConfig cfg;
  cfg.max_iter = 400;
  cfg.escape_radius = 150.0;
  auto rec = dynamics::iterate_orbit(N, Complex(0, 0), cfg);
  CHECK(decay_slope(rec, f) == doctest::Approx(-1.0).epsilon(1e-12));

  // exp(-z^2) from 3: unit drift in w-units
  auto f2 = from_formula("exp(-z^2)");
  auto N2 = NewtonMap::from_function(f2);
  dynamics::IterationConfig cfg2;
  cfg2.max_iter = 200;
  cfg2.tol_root = 0.0;
  auto rec2 = dynamics::iterate_orbit(N2, Complex(3, 0), cfg2);
  double s2 = decay_slope(rec2, f2);
  CHECK(s2 > -1.1);
  CHECK(s2 < -0.9);

  // too-short orbit errors
  dynamics::IterationConfig tiny;
  tiny.max_iter = 5;
  auto rec3 = dynamics::iterate_orbit(N, Complex(0, 0), tiny);
  CHECK_THROWS_AS(decay_slope(rec3, f), std::invalid_argument);
}

TEST_CASE("deep-tract orbit keeps the unit log-drift") {
  // at 1/4 - 10i the n_alpha step is ~1e-28, far below one ulp of z; the
  // orbit session still tracks log|f| exactly
  auto N = std::get<NewtonMap>(functions::catalog::make("n_alpha", alpha1()));
  dynamics::IterationConfig cfg;
  cfg.max_iter = 240;
  cfg.tol_root = 0.0;
  auto rec = dynamics::iterate_orbit(N, Complex(0.25, -10.0), cfg);
  REQUIRE(rec.points.size() >= 200);
  CHECK(decay_slope(rec, *N.function()) == doctest::Approx(-1.0).epsilon(1e-9));
  // the same seed at default tolerances stops immediately and must not be
  // mistaken for a root
  dynamics::IterationConfig dflt;
  auto rec2 = dynamics::iterate_orbit(N, Complex(0.25, -10.0), dflt);
  CHECK(rec2.terminated_by == dynamics::Termination::StepConverged);
  auto out = dynamics::classify_orbit(rec2, *N.function(), dflt);
  CHECK(out.kind == dynamics::OrbitOutcome::Kind::Undetermined);
}

TEST_CASE("baker type: chart-backed parabolic I") {
  auto f = from_formula("exp(-z)");
  auto N = NewtonMap::from_function(f);
  LogChart chart = build_chart(f, real_ray, 0.5);
  dynamics::IterationConfig cfg;
  cfg.max_iter = 260;
  cfg.escape_radius = 250.0;
  std::vector<dynamics::OrbitRecord> orbits;
  orbits.push_back(dynamics::iterate_orbit(N, Complex(0, 0), cfg));
  orbits.push_back(dynamics::iterate_orbit(N, Complex(0, 5), cfg));
  BakerTypeReport rep = classify_baker_type(orbits, &chart);
  CHECK(rep.label == BakerTypeReport::Label::ParabolicI);
  CHECK(rep.confidence == BakerTypeReport::Confidence::GroundTruthChart);
  CHECK_FALSE(rep.h_estimate.has_value());
}

TEST_CASE("baker type: f_alpha kind-1 tract is parabolic I") {
  auto N = std::get<NewtonMap>(functions::catalog::make("n_alpha", alpha1()));
  LogChart chart = build_chart(f_alpha1(), down_ray, 0.2);
  dynamics::IterationConfig cfg;
  cfg.max_iter = 300;
  cfg.tol_root = 0.0;
  std::vector<dynamics::OrbitRecord> orbits;
  orbits.push_back(dynamics::iterate_orbit(N, Complex(0.25, -1.0), cfg));
  orbits.push_back(dynamics::iterate_orbit(N, Complex(0.29, -1.0), cfg));
  BakerTypeReport rep = classify_baker_type(orbits, &chart);
  CHECK(rep.label == BakerTypeReport::Label::ParabolicI);
  CHECK(rep.evidence.re_drift == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("baker type: heuristic on the sine family at golden rotation") {
  double alpha = quotient::find_alpha_for_rotation(0.1, 0.61803398874989485, 1e-3);
  functions::catalog::Params p;
  {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", alpha);
    p["alpha"] = buf;
  }
  p["epsilon"] = "0.1";
  auto N = std::get<NewtonMap>(functions::catalog::make("sine", p));
  dynamics::IterationConfig cfg;
  cfg.max_iter = 400;
  cfg.tol_root = 0.0;
  std::vector<dynamics::OrbitRecord> orbits;
  orbits.push_back(dynamics::iterate_orbit(N, Complex(0.10, 0.2), cfg));
  orbits.push_back(dynamics::iterate_orbit(N, Complex(0.45, 0.2), cfg));
  BakerTypeReport rep = classify_baker_type(orbits, nullptr);
  CHECK(rep.label == BakerTypeReport::Label::Hyperbolic);
  CHECK(rep.confidence == BakerTypeReport::Confidence::Heuristic);
  REQUIRE(rep.h_estimate.has_value());
  CHECK(*rep.h_estimate > 0.0);
  CHECK(rep.evidence.c_min > 0.2);
}

TEST_CASE("baker type preconditions") {
  auto f = from_formula("exp(-z)");
  auto N = NewtonMap::from_function(f);
  dynamics::IterationConfig cfg;
  cfg.max_iter = 260;
  cfg.escape_radius = 250.0;
  std::vector<dynamics::OrbitRecord> one;
  one.push_back(dynamics::iterate_orbit(N, Complex(0, 0), cfg));
  CHECK_THROWS_AS(classify_baker_type(one, nullptr), std::invalid_argument);

  // a converging orbit is not co-escaping
  auto fq = from_formula("z^2-1");
  auto Nq = NewtonMap::from_function(fq);
  dynamics::IterationConfig cfg2;
  cfg2.max_iter = 300;
  cfg2.tol_root = 0.0;
  std::vector<dynamics::OrbitRecord> bad;
  bad.push_back(dynamics::iterate_orbit(Nq, Complex(2, 0), cfg2));
  bad.push_back(dynamics::iterate_orbit(Nq, Complex(3, 0), cfg2));
  CHECK_THROWS_AS(classify_baker_type(bad, nullptr), std::invalid_argument);
}

TEST_CASE("no decay along a bad ray errors") {
  auto f = from_formula("exp(-z)");
  CHECK_THROWS_AS(build_chart(f, [](double t) { return Complex(-t, 0.0); }, 0.5),
                  ChartError);
}
