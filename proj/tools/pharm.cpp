// pharm: command-line front end for the p-harmonic self-map lab.
//
// Exit codes: 0 success, 2 usage, 3 numeric failure, 4 no solution.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pharm/atlas.hpp"
#include "pharm/io.hpp"

using nlohmann::json;
using namespace pharm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitNoSolution = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by every subcommand. Only flags given on the command line override the
// config file, which in turn overrides the defaults.
struct CommonFlags {
  std::string config_path;
  std::string output_dir;
  std::string format;
  double rel_tol = 0, abs_tol = 0, x_max = 0, event_tol = 0, convergence_eps = 0, b_tol = 0;
  std::int64_t max_steps = 0;
  int j_max = 0;
  std::vector<CLI::Option*> opts;

  void attach(CLI::App* app) {
    opts.clear();
    opts.push_back(app->add_option("--config", config_path, "JSON config file"));
    opts.push_back(app->add_option("--output-dir", output_dir, "directory for artifacts"));
    opts.push_back(app->add_option("--format", format, "artifact format: json or csv")
                       ->check(CLI::IsMember({"json", "csv"})));
    opts.push_back(app->add_option("--rel-tol", rel_tol, "integrator relative tolerance"));
    opts.push_back(app->add_option("--abs-tol", abs_tol, "integrator absolute tolerance"));
    opts.push_back(app->add_option("--x-max", x_max, "integration limit in x"));
    opts.push_back(app->add_option("--max-steps", max_steps, "integrator step budget"));
    opts.push_back(app->add_option("--event-tol", event_tol, "event location tolerance"));
    opts.push_back(app->add_option("--convergence-eps", convergence_eps, "convergence ball radius"));
    opts.push_back(app->add_option("--tol,--b-tol", b_tol, "bisection tolerance on b"));
    opts.push_back(app->add_option("--j-max", j_max, "number of eigenpairs"));
  }

  RunConfig resolve() const {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    const auto given = [&](std::size_t i) { return opts[i]->count() > 0; };
    if (given(1)) cfg.output_dir = output_dir;
    if (given(2)) cfg.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    if (given(3)) cfg.integrator.rel_tol = rel_tol;
    if (given(4)) cfg.integrator.abs_tol = abs_tol;
    if (given(5)) cfg.integrator.x_max = x_max;
    if (given(6)) cfg.integrator.max_steps = max_steps;
    if (given(7)) cfg.integrator.event_tol = event_tol;
    if (given(8)) cfg.integrator.convergence_eps = convergence_eps;
    if (given(9)) cfg.b_tol = b_tol;
    if (given(10)) cfg.j_max = j_max;
    cfg.integrator.validate();
    if (!(cfg.b_tol > 0.0)) throw std::invalid_argument("b_tol must be positive");
    if (cfg.j_max < 1) throw std::invalid_argument("j_max must be at least 1");
    return cfg;
  }
};

std::string number_tag(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::string stem(const char* kind, const Params& params) {
  return std::string(kind) + "_p" + number_tag(params.p) + "_m" + std::to_string(params.m);
}

std::ofstream open_artifact(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  const auto path = std::filesystem::path(cfg.output_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cerr << "wrote " << path.string() << "\n";
  return out;
}

void write_json_artifact(const RunConfig& cfg, const std::string& name, const json& j) {
  if (cfg.output_dir.empty()) return;
  open_artifact(cfg, name) << j.dump(2) << '\n';
}

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

json orbit_rows(const Orbit& orbit) {
  json rows = json::array();
  for (const auto& s : orbit.samples) {
    rows.push_back({s.state.x, s.state.h, s.state.dh, s.a_val, s.w_val, s.theta, s.rho, t_of_x(s.state.x),
                    s.state.h + std::numbers::pi / 2});
  }
  return rows;
}

void write_orbit_artifacts(const RunConfig& cfg, const std::string& base, const Orbit& orbit, json document) {
  if (cfg.output_dir.empty()) return;
  if (cfg.format == OutputFormat::Csv) {
    auto csv = open_artifact(cfg, base + ".csv");
    write_orbit_csv(csv, orbit);
    write_json_artifact(cfg, base + ".meta.json", document["provenance"]);
  } else {
    document["columns"] = kCsvHeader;
    document["samples"] = orbit_rows(orbit);
  }
  write_json_artifact(cfg, base + ".json", document);
}

int cmd_window(double p, double m_min, double m_max, const RunConfig& cfg) {
  const Params base = validate_params(p, 2);
  const int lo = static_cast<int>(std::max(2.0, std::ceil(m_min)));
  const int hi = static_cast<int>(std::floor(m_max));
  if (hi < lo) throw UsageError("--m-max must not be below --m-min");
  json table = json::array();
  for (int m = lo; m <= hi; ++m) {
    const Params params{base.p, m};
    json row = to_json(regime(params));
    row["m"] = m;
    row["in_existence_window"] = in_existence_window(params);
    row["in_winding_window"] = in_winding_window(params);
    table.push_back(std::move(row));
  }
  json out = {
      {"provenance", provenance(cfg, base)},
      {"p", base.p},
      {"existence_lower", base.p},
      {"existence_upper", existence_upper(base.p)},
      {"winding_upper", winding_upper(base.p)},
      {"table", table},
  };
  write_json_artifact(cfg, "window_p" + number_tag(base.p) + ".json", out);
  emit(out);
  return kExitOk;
}

int cmd_shoot(double p, double m, const CLI::Option* b_opt, double b, const CLI::Option* d_opt, double d,
              const RunConfig& cfg) {
  const Params params = validate_params(p, m);
  if ((b_opt->count() > 0) == (d_opt->count() > 0)) throw UsageError("give exactly one of --b and --d");
  ShootSpec spec;
  spec.kind = b_opt->count() > 0 ? OrbitKind::BOrbit : OrbitKind::DOrbit;
  spec.value = spec.kind == OrbitKind::BOrbit ? b : d;
  spec.validate();
  const OrbitRun run = run_orbit(spec, params, cfg.integrator);
  json out = {
      {"provenance", provenance(cfg, params)},
      {"orbit_kind", spec.kind == OrbitKind::BOrbit ? "b" : "d"},
      {"value", spec.value},
      {"outcome", to_json(run.outcome)},
  };
  const bool failed = run.orbit.samples.empty();
  if (!failed) {
    out["energy_error_estimate"] = energy_error_estimate(run.orbit, params);
    const std::string base = stem("shoot", params) + "_" + (spec.kind == OrbitKind::BOrbit ? "b" : "d") +
                             number_tag(spec.value);
    write_orbit_artifacts(cfg, base, run.orbit, out);
  }
  emit(out);
  return failed ? kExitNumeric : kExitOk;
}

int cmd_solve(double p, double m, int k, const RunConfig& cfg) {
  const Params params = validate_params(p, m);
  if (k < 1) throw UsageError("--k must be at least 1");
  json out = {{"provenance", provenance(cfg, params)}, {"k", k}};
  try {
    const ShootResult r = find_bk(params, k, cfg.b_tol, cfg.integrator);
    out["result"] = to_json(r);
    out["omega"] = r.outcome.omega;
    out["b"] = r.b_k;
    const std::string base = stem("solve", params) + "_k" + std::to_string(k);
    if (!cfg.output_dir.empty() && cfg.format == OutputFormat::Csv) {
      auto csv = open_artifact(cfg, base + "_r.csv");
      write_r_profile_csv(csv, r.solution);
    }
    write_orbit_artifacts(cfg, base, r.orbit, out);
    emit(out);
    return kExitOk;
  } catch (const NumericError& e) {
    out["error"] = to_string(e.kind());
    out["message"] = e.what();
    emit(out);
    std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
    return e.kind() == ErrorKind::BracketNotFound ? kExitNoSolution : kExitNumeric;
  }
}

int cmd_atlas(const std::string& p_range, const std::string& m_range, int k_max, int jobs, RunConfig cfg) {
  if (jobs < 1) throw UsageError("--jobs must be at least 1");
  if (k_max < 1) throw UsageError("--k-max must be at least 1");
  const auto grid = atlas_grid(parse_range(p_range), parse_range(m_range));
  cfg.grid = grid;
  const auto lines = run_atlas(grid, k_max, cfg, jobs);
  if (!cfg.output_dir.empty()) {
    auto out = open_artifact(cfg, "atlas.jsonl");
    for (const auto& line : lines) out << line << '\n';
  } else {
    for (const auto& line : lines) std::cout << line << '\n';
    std::cout.flush();
  }
  return kExitOk;
}

int cmd_spectrum(double p, double m, bool numeric, int n_grid, const RunConfig& cfg) {
  const Params params = validate_params(p, m);
  const SpectrumReport report = spectrum_report(params, cfg.j_max, numeric, default_spectral_grid(), n_grid);
  json out = to_json(report);
  out["provenance"] = provenance(cfg, params);
  write_json_artifact(cfg, stem("spectrum", params) + ".json", out);
  emit(out);
  return kExitOk;
}

int cmd_stability(double p, double m, const RunConfig& cfg) {
  const Params params = validate_params(p, m);
  const Verdict v = stability_verdict(params, std::max(3, cfg.j_max));
  json out = {
      {"provenance", provenance(cfg, params)},
      {"verdict", to_string(v)},
      {"lambda_hat_1", params.p - params.m},
  };
  write_json_artifact(cfg, stem("stability", params) + ".json", out);
  emit(out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rotationally symmetric p-harmonic self-maps of spheres"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  double p = 0, m = 0, b = 0, d = 0, m_min = 3, m_max = 40;
  int k = 1, k_max = 1, jobs = 1, n_grid = 0;
  bool numeric = false;
  std::string p_range, m_range;

  CommonFlags common;

  auto* window = app.add_subcommand("window", "existence and winding windows for exponent p");
  window->add_option("--p", p, "exponent p")->required();
  window->add_option("--m-min", m_min, "smallest m in the table");
  window->add_option("--m-max", m_max, "largest m in the table");

  auto* shoot = app.add_subcommand("shoot", "integrate one b- or d-orbit");
  shoot->add_option("--p", p)->required();
  shoot->add_option("--m", m)->required();
  auto* b_opt = shoot->add_option("--b", b, "initial slope of a b-orbit");
  auto* d_opt = shoot->add_option("--d", d, "initial value of a d-orbit");

  auto* solve = app.add_subcommand("solve", "locate b_k and reconstruct the k-th solution");
  solve->add_option("--p", p)->required();
  solve->add_option("--m", m)->required();
  solve->add_option("--k", k)->required();

  auto* atlas = app.add_subcommand("atlas", "solve a (p, m, k) grid, JSON lines in (p, m, k) order");
  atlas->add_option("--p-range", p_range, "a:b[:step]")->required();
  atlas->add_option("--m-range", m_range, "a:b[:step]")->required();
  atlas->add_option("--k-max", k_max)->required();
  atlas->add_option("--jobs", jobs, "worker threads");

  auto* spectrum = app.add_subcommand("spectrum", "Jacobi spectrum of the identity map");
  spectrum->add_option("--p", p)->required();
  spectrum->add_option("--m", m)->required();
  spectrum->add_flag("--numeric", numeric, "also run the collocation eigensolver");
  spectrum->add_option("--n-grid", n_grid, "collocation degree (default max(32, 8 j_max))");

  auto* stability = app.add_subcommand("stability", "stability verdict for the identity map");
  stability->add_option("--p", p)->required();
  stability->add_option("--m", m)->required();

  for (auto* sub : {window, shoot, solve, atlas, spectrum, stability}) common.attach(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    // attach() was called per subcommand; re-attach the parsed one so resolve() reads its options.
    CLI::App* used = app.get_subcommands().front();
    CommonFlags flags = common;
    flags.opts.clear();
    for (const char* name : {"--config", "--output-dir", "--format", "--rel-tol", "--abs-tol", "--x-max",
                             "--max-steps", "--event-tol", "--convergence-eps", "--tol", "--j-max"}) {
      flags.opts.push_back(used->get_option(name));
    }
    const RunConfig cfg = flags.resolve();
    if (used == window) return cmd_window(p, m_min, m_max, cfg);
    if (used == shoot) return cmd_shoot(p, m, b_opt, b, d_opt, d, cfg);
    if (used == solve) return cmd_solve(p, m, k, cfg);
    if (used == atlas) return cmd_atlas(p_range, m_range, k_max, jobs, cfg);
    if (used == spectrum) return cmd_spectrum(p, m, numeric, n_grid, cfg);
    if (used == stability) return cmd_stability(p, m, cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
