// newton-atlas: basins, orbits, charts and rotation numbers for Newton maps
// of entire functions.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "newton/dynamics.hpp"
#include "newton/expr.hpp"
#include "newton/functions.hpp"
#include "newton/quotient.hpp"
#include "newton/render.hpp"
#include "newton/singularities.hpp"

namespace {

using json = nlohmann::json;
using namespace newton;

constexpr const char* kVersion = "0.1.0";

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

struct MapFlags {
  std::string family;
  std::vector<std::string> params;
  std::string formula;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family, "catalog family name");
    cmd->add_option("--param", params, "family parameter key=value (repeatable)");
    cmd->add_option("--formula", formula, "entire function formula in z");
  }

  functions::catalog::MapSpec spec() const {
    functions::catalog::MapSpec s;
    s.family = family;
    s.formula = formula;
    for (const std::string& kv : params) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("--param expects key=value, got '" + kv + "'");
      }
      s.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (s.family.empty() && s.formula.empty()) {
      throw std::invalid_argument("either --family or --formula is required");
    }
    if (!s.family.empty() && !s.formula.empty()) {
      throw std::invalid_argument("--family and --formula are mutually exclusive");
    }
    return s;
  }

  json to_json() const {
    json j;
    j["family"] = family;
    j["formula"] = formula;
    j["params"] = params;
    return j;
  }
};

struct IterFlags {
  int max_iter = 2000;
  double tol_root = 1e-12;
  double escape_radius = 1e6;
  double f_zero_tol = 1e-8;
  int cycle_window = 64;

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-iter", max_iter, "iteration budget");
    cmd->add_option("--tol-root", tol_root, "step tolerance for root convergence");
    cmd->add_option("--escape-radius", escape_radius, "escape radius");
    cmd->add_option("--f-zero-tol", f_zero_tol, "|f| threshold for the f->0 tag");
    cmd->add_option("--cycle-window", cycle_window, "revisit-detection window");
  }

  dynamics::IterationConfig config() const {
    return {max_iter, tol_root, escape_radius, f_zero_tol, cycle_window};
  }

  json to_json() const {
    json j;
    j["max_iter"] = max_iter;
    j["tol_root"] = tol_root;
    j["escape_radius"] = escape_radius;
    j["f_zero_tol"] = f_zero_tol;
    j["cycle_window"] = cycle_window;
    return j;
  }
};

Complex parse_complex(const std::string& text) {
  return expr::eval_constant(text);
}

std::function<Complex(double)> parse_ray(const std::string& text) {
  auto ast = std::make_shared<const expr::ExprAst>(
      expr::parse_function(text, expr::Mode::Meromorphic, "t"));
  return [ast](double t) { return expr::eval_jet(*ast, Complex(t, 0.0)).v; };
}

int default_workers() {
  if (const char* env = std::getenv("NEWTON_ATLAS_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

class Manifest {
 public:
  Manifest(std::string subcommand, std::string path)
      : path_(std::move(path)), start_(std::chrono::steady_clock::now()) {
    doc_["tool"] = "newton-atlas";
    doc_["version"] = kVersion;
    doc_["subcommand"] = std::move(subcommand);
  }

  json& config() { return doc_["config"]; }
  void add_output(const std::string& p) { doc_["outputs"].push_back(p); }
  void set(const std::string& key, json value) { doc_[key] = std::move(value); }

  void write() {
    auto elapsed = std::chrono::steady_clock::now() - start_;
    doc_["wall_time_seconds"] =
        std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
    doc_["outputs"].push_back(path_);
    std::ofstream out(path_);
    if (!out) throw std::runtime_error("cannot write manifest '" + path_ + "'");
    out << doc_.dump(2) << "\n";
  }

 private:
  std::string path_;
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

std::string manifest_path(const std::string& explicit_path, const std::string& out) {
  if (!explicit_path.empty()) return explicit_path;
  return out + ".manifest.json";
}

json outcome_json(const dynamics::OrbitOutcome& o, const dynamics::OrbitRecord& rec) {
  json j;
  j["outcome"] = dynamics::to_string(o.kind);
  j["terminated_by"] = dynamics::to_string(rec.terminated_by);
  j["steps"] = rec.points.size() - 1;
  j["final"] = complex_json(rec.points.back());
  if (o.kind == dynamics::OrbitOutcome::Kind::ConvergedToRoot) {
    j["xi"] = complex_json(o.xi);
    j["multiplicity"] = o.multiplicity;
  }
  if (o.kind == dynamics::OrbitOutcome::Kind::PoleHit) j["pole_at"] = complex_json(o.pole_at);
  if (o.kind == dynamics::OrbitOutcome::Kind::CycleDetected) j["period"] = o.period;
  return j;
}

std::vector<Complex> parse_seeds(const std::string& text) {
  std::vector<Complex> seeds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t semi = text.find(';', pos);
    std::string item = text.substr(pos, semi == std::string::npos ? std::string::npos
                                                                  : semi - pos);
    if (!item.empty()) seeds.push_back(parse_complex(item));
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"newton-atlas: a numerical laboratory for Newton maps of entire functions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file with [subcommand] sections");
  app.set_version_flag("--version", kVersion);

  // ---- render ----
  auto* render_cmd = app.add_subcommand("render", "rasterize per-pixel orbit outcomes");
  MapFlags render_map;
  render_map.attach(render_cmd);
  IterFlags render_iter;
  render_iter.max_iter = 200;
  render_iter.attach(render_cmd);
  std::string render_center = "0", render_out = "basins.ppm", render_manifest;
  double render_width = 4.0;
  int render_px = 256, render_px_h = 0, render_workers = default_workers();
  unsigned render_seed = 0;
  render_cmd->add_option("--center", render_center, "viewport center (complex)");
  render_cmd->add_option("--width", render_width, "viewport width");
  render_cmd->add_option("--px", render_px, "horizontal pixels");
  render_cmd->add_option("--px-h", render_px_h, "vertical pixels (default: square)");
  render_cmd->add_option("--workers", render_workers, "worker threads");
  render_cmd->add_option("--palette-seed", render_seed, "palette seed");
  render_cmd->add_option("--out", render_out, "output PPM path");
  render_cmd->add_option("--manifest", render_manifest, "manifest path");

  // ---- orbit ----
  auto* orbit_cmd = app.add_subcommand("orbit", "iterate one orbit and dump it as CSV");
  MapFlags orbit_map;
  orbit_map.attach(orbit_cmd);
  IterFlags orbit_iter;
  orbit_iter.attach(orbit_cmd);
  std::string orbit_start = "0", orbit_out = "orbit.csv", orbit_summary, orbit_manifest;
  orbit_cmd->add_option("--start", orbit_start, "starting point (complex)");
  orbit_cmd->add_option("--out", orbit_out, "output CSV path");
  orbit_cmd->add_option("--summary", orbit_summary, "outcome JSON path");
  orbit_cmd->add_option("--manifest", orbit_manifest, "manifest path");

  // ---- classify-type ----
  auto* type_cmd =
      app.add_subcommand("classify-type", "type an invariant escape domain from orbits");
  MapFlags type_map;
  type_map.attach(type_cmd);
  IterFlags type_iter;
  type_iter.max_iter = 400;
  type_iter.attach(type_cmd);
  std::string type_seeds = "0;1", type_out = "type.json", type_ray, type_manifest;
  double type_rtarget = 0.2;
  type_cmd->add_option("--seeds", type_seeds, "semicolon-separated orbit seeds");
  type_cmd->add_option("--ray", type_ray,
                       "decay ray in t; enables the chart-backed classifier");
  type_cmd->add_option("--r-target", type_rtarget, "chart radius target");
  type_cmd->add_option("--out", type_out, "report JSON path");
  type_cmd->add_option("--manifest", type_manifest, "manifest path");

  // ---- rotation ----
  auto* rot_cmd = app.add_subcommand("rotation", "rotation numbers of the sine family");
  std::vector<double> rot_alphas;
  double rot_eps = 0.1, rot_x0 = 0.0;
  long rot_n = 100000;
  std::string rot_out = "rotation.csv", rot_manifest;
  rot_cmd->add_option("--alpha", rot_alphas, "alpha values (repeatable)")->required();
  rot_cmd->add_option("--epsilon", rot_eps, "epsilon in (0,1)");
  rot_cmd->add_option("--n", rot_n, "iterations per estimate");
  rot_cmd->add_option("--x0", rot_x0, "starting point on the circle");
  rot_cmd->add_option("--out", rot_out, "output CSV path");
  rot_cmd->add_option("--manifest", rot_manifest, "manifest path");

  // ---- semiconj ----
  auto* semi_cmd = app.add_subcommand("semiconj", "residual of the dynamics-mod-1 identity");
  std::string semi_family = "n_alpha", semi_out = "semiconj.json", semi_manifest;
  double semi_alpha = 0.3;
  int semi_samples = 1000;
  long semi_seed = -1;
  semi_cmd->add_option("--family", semi_family, "n_alpha or expexp");
  semi_cmd->add_option("--alpha", semi_alpha, "family parameter");
  semi_cmd->add_option("--samples", semi_samples, "number of samples");
  semi_cmd->add_option("--seed", semi_seed,
                       "RNG seed; omitted = deterministic stratified grid");
  semi_cmd->add_option("--out", semi_out, "report JSON path");
  semi_cmd->add_option("--manifest", semi_manifest, "manifest path");

  // ---- chart ----
  auto* chart_cmd = app.add_subcommand("chart", "logarithmic-singularity chart and eta0");
  MapFlags chart_map;
  chart_map.attach(chart_cmd);
  std::string chart_ray = "0.25-1i*t", chart_out = "chart.json", chart_manifest;
  double chart_rtarget = 0.2, chart_eta_span = 10.0, chart_eta_step = 0.25;
  chart_cmd->add_option("--ray", chart_ray, "decay ray as a formula in t");
  chart_cmd->add_option("--r-target", chart_rtarget, "tract radius (eta = -log r)");
  chart_cmd->add_option("--eta-span", chart_eta_span, "search span above eta");
  chart_cmd->add_option("--eta-step", chart_eta_step, "eta0 search step");
  chart_cmd->add_option("--out", chart_out, "report JSON path");
  chart_cmd->add_option("--manifest", chart_manifest, "manifest path");

  // ---- reconstruct ----
  auto* recon_cmd =
      app.add_subcommand("reconstruct", "f(z1)/f(z0) from the Newton map alone");
  MapFlags recon_map;
  recon_map.attach(recon_cmd);
  std::string recon_z0 = "0", recon_z1 = "1", recon_out = "reconstruct.json",
              recon_manifest;
  int recon_segments = 4;
  recon_cmd->add_option("--z0", recon_z0, "path start (complex)");
  recon_cmd->add_option("--z1", recon_z1, "path end (complex)");
  recon_cmd->add_option("--segments", recon_segments, "initial panel count");
  recon_cmd->add_option("--out", recon_out, "report JSON path");
  recon_cmd->add_option("--manifest", recon_manifest, "manifest path");

  // ---- probe ----
  auto* probe_cmd = app.add_subcommand("probe", "asymptotic-value probe along a ray or orbit");
  MapFlags probe_map;
  probe_map.attach(probe_cmd);
  IterFlags probe_iter;
  probe_iter.attach(probe_cmd);
  std::string probe_ray, probe_start, probe_out = "probe.csv", probe_summary,
                         probe_manifest;
  double probe_tmax = 20.0;
  int probe_samples = 256;
  probe_cmd->add_option("--ray", probe_ray, "ray as a formula in t");
  probe_cmd->add_option("--orbit-start", probe_start, "orbit seed (complex)");
  probe_cmd->add_option("--tmax", probe_tmax, "ray parameter bound");
  probe_cmd->add_option("--samples", probe_samples, "ray sample count");
  probe_cmd->add_option("--out", probe_out, "trace CSV path");
  probe_cmd->add_option("--summary", probe_summary, "verdict JSON path");
  probe_cmd->add_option("--manifest", probe_manifest, "manifest path");

  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*render_cmd) {
      Manifest man("render", manifest_path(render_manifest, render_out));
      render::SceneConfig scene;
      scene.map = render_map.spec();
      scene.center = parse_complex(render_center);
      scene.width = render_width;
      scene.px_w = render_px;
      scene.px_h = render_px_h > 0 ? render_px_h : render_px;
      scene.iter = render_iter.config();
      scene.palette_seed = render_seed;
      man.config()["map"] = render_map.to_json();
      man.config()["center"] = complex_json(scene.center);
      man.config()["width"] = scene.width;
      man.config()["px_w"] = scene.px_w;
      man.config()["px_h"] = scene.px_h;
      man.config()["iteration"] = render_iter.to_json();
      man.config()["palette_seed"] = render_seed;
      man.config()["workers"] = render_workers;
      render::BasinImage img = render::render(scene, render_workers);
      render::write_ppm(img, render_out);
      man.add_output(render_out);
      json roots = json::array();
      for (Complex r : img.roots) roots.push_back(complex_json(r));
      man.set("roots", roots);
      char hash[32];
      std::snprintf(hash, sizeof hash, "%016llx",
                    static_cast<unsigned long long>(render::fnv1a64(img.rgb)));
      man.set("rgb_fnv1a64", hash);
      man.write();
    } else if (*orbit_cmd) {
      Manifest man("orbit", manifest_path(orbit_manifest, orbit_out));
      auto spec = orbit_map.spec();
      functions::NewtonMap map = functions::catalog::newton_map(spec);
      Complex z0 = parse_complex(orbit_start);
      dynamics::IterationConfig cfg = orbit_iter.config();
      man.config()["map"] = orbit_map.to_json();
      man.config()["start"] = complex_json(z0);
      man.config()["iteration"] = orbit_iter.to_json();
      dynamics::OrbitRecord rec = dynamics::iterate_orbit(map, z0, cfg);
      std::ofstream csv(orbit_out);
      if (!csv) throw std::runtime_error("cannot open '" + orbit_out + "'");
      dynamics::write_orbit_csv(rec, csv);
      man.add_output(orbit_out);
      json summary;
      if (map.function()) {
        dynamics::OrbitOutcome o = dynamics::classify_orbit(rec, *map.function(), cfg);
        summary = outcome_json(o, rec);
      } else {
        summary["terminated_by"] = dynamics::to_string(rec.terminated_by);
      }
      man.set("summary", summary);
      if (!orbit_summary.empty()) {
        std::ofstream js(orbit_summary);
        js << summary.dump(2) << "\n";
        man.add_output(orbit_summary);
      }
      std::cout << summary.dump(2) << "\n";
      man.write();
    } else if (*type_cmd) {
      Manifest man("classify-type", manifest_path(type_manifest, type_out));
      auto spec = type_map.spec();
      functions::NewtonMap map = functions::catalog::newton_map(spec);
      dynamics::IterationConfig cfg = type_iter.config();
      std::vector<Complex> seeds = parse_seeds(type_seeds);
      if (seeds.size() < 2) throw std::invalid_argument("needs at least two seeds");
      man.config()["map"] = type_map.to_json();
      man.config()["seeds"] = type_seeds;
      man.config()["iteration"] = type_iter.to_json();
      man.config()["ray"] = type_ray;
      man.config()["r_target"] = type_rtarget;
      std::vector<dynamics::OrbitRecord> orbits;
      for (Complex s : seeds) orbits.push_back(dynamics::iterate_orbit(map, s, cfg));
      std::optional<singularities::LogChart> chart;
      if (!type_ray.empty()) {
        if (!map.function()) {
          throw std::invalid_argument("chart route needs a map with an attached f");
        }
        chart = singularities::build_chart(*map.function(), parse_ray(type_ray),
                                           type_rtarget);
      }
      singularities::BakerTypeReport rep =
          singularities::classify_baker_type(orbits, chart ? &*chart : nullptr);
      json j;
      j["label"] = singularities::to_string(rep.label);
      j["confidence"] = rep.confidence ==
                            singularities::BakerTypeReport::Confidence::GroundTruthChart
                        ? "ground-truth-chart"
                        : "heuristic";
      if (rep.h_estimate) j["h_estimate"] = *rep.h_estimate;
      j["evidence"] = {{"re_drift", rep.evidence.re_drift},
                       {"im_range_per_orbit", rep.evidence.im_range_per_orbit},
                       {"im_spread", rep.evidence.im_spread},
                       {"c_min", rep.evidence.c_min},
                       {"c_mean", rep.evidence.c_mean},
                       {"c_max", rep.evidence.c_max},
                       {"transversal_drift", rep.evidence.transversal_drift}};
      std::ofstream js(type_out);
      if (!js) throw std::runtime_error("cannot open '" + type_out + "'");
      js << j.dump(2) << "\n";
      man.add_output(type_out);
      std::cout << j.dump(2) << "\n";
      man.write();
    } else if (*rot_cmd) {
      Manifest man("rotation", manifest_path(rot_manifest, rot_out));
      man.config()["alpha"] = rot_alphas;
      man.config()["epsilon"] = rot_eps;
      man.config()["n"] = rot_n;
      man.config()["x0"] = rot_x0;
      std::ofstream csv(rot_out);
      if (!csv) throw std::runtime_error("cannot open '" + rot_out + "'");
      csv << "alpha,epsilon,n,rho,bound\n";
      char line[256];
      for (double a : rot_alphas) {
        auto params = quotient::SineFamilyParams::make(a, rot_eps);
        auto est = quotient::rotation_number(params, rot_x0, rot_n);
        std::snprintf(line, sizeof line, "%.17g,%.17g,%ld,%.17g,%.17g", a, rot_eps,
                      est.n_iter, est.rho, est.error_bound);
        csv << line << "\n";
      }
      man.add_output(rot_out);
      man.write();
    } else if (*semi_cmd) {
      Manifest man("semiconj", manifest_path(semi_manifest, semi_out));
      man.config()["family"] = semi_family;
      man.config()["alpha"] = semi_alpha;
      man.config()["samples"] = semi_samples;
      man.config()["seed"] = semi_seed;
      bool expexp = semi_family == "expexp";
      if (!expexp && semi_family != "n_alpha") {
        throw std::invalid_argument("semiconj family must be n_alpha or expexp");
      }
      // n_alpha samples live in [0,1] x [-1,1] off the poles; expexp samples
      // in [0,1] x [0.1,1] where neither side overflows.
      std::vector<Complex> samples;
      samples.reserve(semi_samples);
      auto accept = [&](Complex Z) {
        if (expexp) return true;
        return std::abs(1.0 + quotient::project(Z)) >= 1.0;
      };
      double im_lo = expexp ? 0.1 : -1.0;
      double im_hi = 1.0;
      if (semi_seed >= 0) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(semi_seed));
        std::uniform_real_distribution<double> ux(0.0, 1.0), uy(im_lo, im_hi);
        while (static_cast<int>(samples.size()) < semi_samples) {
          Complex Z(ux(rng), uy(rng));
          if (accept(Z)) samples.push_back(Z);
        }
      } else {
        // deterministic low-discrepancy sequence; rejection keeps drawing
        // until the requested count is accepted
        for (long k = 1; static_cast<int>(samples.size()) < semi_samples; ++k) {
          double x = 0.7548776662466927 * k;
          double y = 0.5698402909980532 * k;
          x -= std::floor(x);
          y -= std::floor(y);
          Complex Z(x, im_lo + (im_hi - im_lo) * y);
          if (accept(Z)) samples.push_back(Z);
        }
      }
      double residual = expexp
                            ? quotient::check_semiconjugacy_expexp(semi_alpha, samples)
                            : quotient::check_semiconjugacy(semi_alpha, samples);
      json j;
      j["family"] = semi_family;
      j["alpha"] = semi_alpha;
      j["samples"] = samples.size();
      j["max_residual"] = residual;
      std::ofstream js(semi_out);
      if (!js) throw std::runtime_error("cannot open '" + semi_out + "'");
      js << j.dump(2) << "\n";
      man.add_output(semi_out);
      std::cout << j.dump(2) << "\n";
      man.write();
    } else if (*chart_cmd) {
      Manifest man("chart", manifest_path(chart_manifest, chart_out));
      auto spec = chart_map.spec();
      functions::EntireFunction f = functions::catalog::entire_function(spec);
      man.config()["map"] = chart_map.to_json();
      man.config()["ray"] = chart_ray;
      man.config()["r_target"] = chart_rtarget;
      man.config()["eta_span"] = chart_eta_span;
      man.config()["eta_step"] = chart_eta_step;
      singularities::LogChart chart =
          singularities::build_chart(f, parse_ray(chart_ray), chart_rtarget);
      singularities::Eta0Report rep = singularities::find_eta0(
          chart, chart.eta() + chart_eta_span, chart_eta_step);
      json j;
      j["eta"] = rep.eta;
      j["found"] = rep.found;
      if (rep.found) j["eta0"] = rep.eta0;
      j["max_defect"] = rep.max_defect;
      j["min_re_drift"] = rep.min_re_drift;
      j["grid"] = {{"re_span", rep.re_span}, {"im_span", rep.im_span}, {"n", rep.grid_n}};
      j["seed_w"] = complex_json(chart.seed_w());
      j["seed_z"] = complex_json(chart.seed_z());
      std::ofstream js(chart_out);
      if (!js) throw std::runtime_error("cannot open '" + chart_out + "'");
      js << j.dump(2) << "\n";
      man.add_output(chart_out);
      std::cout << j.dump(2) << "\n";
      man.write();
      if (!rep.found) return 1;
    } else if (*recon_cmd) {
      Manifest man("reconstruct", manifest_path(recon_manifest, recon_out));
      auto spec = recon_map.spec();
      functions::NewtonMap map = functions::catalog::newton_map(spec);
      Complex z0 = parse_complex(recon_z0), z1 = parse_complex(recon_z1);
      man.config()["map"] = recon_map.to_json();
      man.config()["z0"] = complex_json(z0);
      man.config()["z1"] = complex_json(z1);
      man.config()["segments"] = recon_segments;
      functions::ReconstructionResult r =
          functions::reconstruct_ratio(map, z0, z1, recon_segments);
      json j;
      j["ratio"] = complex_json(r.ratio);
      j["est_error"] = r.est_error;
      json path = json::array();
      for (Complex p : r.path) path.push_back(complex_json(p));
      j["path"] = path;
      std::ofstream js(recon_out);
      if (!js) throw std::runtime_error("cannot open '" + recon_out + "'");
      js << j.dump(2) << "\n";
      man.add_output(recon_out);
      std::cout << j.dump(2) << "\n";
      man.write();
    } else if (*probe_cmd) {
      Manifest man("probe", manifest_path(probe_manifest, probe_out));
      auto spec = probe_map.spec();
      functions::EntireFunction f = functions::catalog::entire_function(spec);
      man.config()["map"] = probe_map.to_json();
      man.config()["ray"] = probe_ray;
      man.config()["orbit_start"] = probe_start;
      man.config()["tmax"] = probe_tmax;
      man.config()["samples"] = probe_samples;
      singularities::AsymptoticProbe probe;
      if (!probe_ray.empty()) {
        probe = singularities::probe_asymptotic(f, parse_ray(probe_ray), probe_tmax,
                                                probe_samples);
      } else if (!probe_start.empty()) {
        functions::NewtonMap map = functions::catalog::newton_map(spec);
        dynamics::OrbitRecord rec = dynamics::iterate_orbit(
            map, parse_complex(probe_start), probe_iter.config());
        probe = singularities::probe_asymptotic(f, rec);
      } else {
        throw std::invalid_argument("probe needs --ray or --orbit-start");
      }
      std::ofstream csv(probe_out);
      if (!csv) throw std::runtime_error("cannot open '" + probe_out + "'");
      csv << "t,re_z,im_z,abs_f\n";
      char line[256];
      for (const auto& s : probe.samples) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g", s.t, s.z.real(),
                      s.z.imag(), s.f_abs);
        csv << line << "\n";
      }
      man.add_output(probe_out);
      json j;
      j["verdict"] = singularities::to_string(probe.verdict);
      if (probe.verdict == singularities::AsymptoticProbe::Verdict::TendsTo) {
        j["limit"] = complex_json(probe.limit);
      }
      man.set("summary", j);
      if (!probe_summary.empty()) {
        std::ofstream js(probe_summary);
        js << j.dump(2) << "\n";
        man.add_output(probe_summary);
      }
      std::cout << j.dump(2) << "\n";
      man.write();
    }
  } catch (const expr::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
