#include "pharm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pharm {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

template <typename T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config: bad value for '") + key + "'");
  }
}

void apply_integrator(IntegratorConfig& cfg, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: 'integrator' must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key == "rel_tol") cfg.rel_tol = get_as<double>(j, "rel_tol");
    else if (key == "abs_tol") cfg.abs_tol = get_as<double>(j, "abs_tol");
    else if (key == "x_max") cfg.x_max = get_as<double>(j, "x_max");
    else if (key == "max_steps") cfg.max_steps = get_as<std::int64_t>(j, "max_steps");
    else if (key == "event_tol") cfg.event_tol = get_as<double>(j, "event_tol");
    else if (key == "convergence_eps") cfg.convergence_eps = get_as<double>(j, "convergence_eps");
    else throw std::invalid_argument("config: unknown integrator key '" + key + "'");
  }
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void apply_config(RunConfig& config, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "integrator") {
      apply_integrator(config.integrator, value);
    } else if (key == "b_tol") {
      config.b_tol = get_as<double>(j, "b_tol");
    } else if (key == "j_max") {
      config.j_max = get_as<int>(j, "j_max");
    } else if (key == "output_dir") {
      config.output_dir = get_as<std::string>(j, "output_dir");
    } else if (key == "format") {
      const auto f = get_as<std::string>(j, "format");
      if (f == "json") config.format = OutputFormat::Json;
      else if (f == "csv") config.format = OutputFormat::Csv;
      else throw std::invalid_argument("config: format must be 'json' or 'csv'");
    } else if (key == "grid") {
      if (!value.is_array()) throw std::invalid_argument("config: 'grid' must be an array of [p, m] pairs");
      config.grid.clear();
      for (const auto& cell : value) {
        if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() || !cell[1].is_number()) {
          throw std::invalid_argument("config: grid entries must be [p, m]");
        }
        config.grid.push_back(validate_params(cell[0].get<double>(), cell[1].get<double>()));
      }
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  config.integrator.validate();
  if (!(config.b_tol > 0.0)) throw std::invalid_argument("config: b_tol must be positive");
  if (config.j_max < 1) throw std::invalid_argument("config: j_max must be at least 1");
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  RunConfig config;
  apply_config(config, j);
  return config;
}

json to_json(const RunConfig& config) {
  const IntegratorConfig& c = config.integrator;
  json grid = json::array();
  for (const auto& p : config.grid) grid.push_back({p.p, p.m});
  return {
      {"integrator",
       {{"rel_tol", c.rel_tol},
        {"abs_tol", c.abs_tol},
        {"x_max", c.x_max},
        {"max_steps", c.max_steps},
        {"event_tol", c.event_tol},
        {"convergence_eps", c.convergence_eps}}},
      {"b_tol", config.b_tol},
      {"j_max", config.j_max},
      {"grid", grid},
      {"output_dir", config.output_dir},
      {"format", config.format == OutputFormat::Json ? "json" : "csv"},
  };
}

json to_json(const Params& params) { return {{"p", params.p}, {"m", params.m}}; }

json to_json(const RegimeReport& r) {
  return {
      {"existence_lower", r.existence_lower},
      {"existence_upper", r.existence_upper},
      {"winding_upper", r.winding_upper},
      {"discriminant", r.discriminant},
      {"alpha_plus", {{"re", r.alpha_plus.real()}, {"im", r.alpha_plus.imag()}}},
      {"alpha_minus", {{"re", r.alpha_minus.real()}, {"im", r.alpha_minus.imag()}}},
      {"regime", to_string(r.regime)},
  };
}

json to_json(const OrbitOutcome& o) {
  json j = {
      {"classification", to_string(o.classification)},
      {"x_e", o.x_e},
      {"omega", o.omega},
      {"zero_count", o.zero_count},
  };
  if (!o.diagnostic.empty()) j["diagnostic"] = o.diagnostic;
  return j;
}

json to_json(const ShootResult& r) {
  return {
      {"params", to_json(r.params)},
      {"k", r.k},
      {"b_k", r.b_k},
      {"bracket_width", r.bracket_width},
      {"b_adaptive", r.b_adaptive},
      {"outcome", to_json(r.outcome)},
      {"k_end", r.solution.k_end},
      {"energy", r.energy},
      {"warnings", r.warnings},
  };
}

json to_json(const SpectrumReport& report) {
  json pairs = json::array();
  for (const auto& e : report.pairs) {
    json j = {
        {"j", e.j},
        {"lambda_hat_theorem", e.lambda_hat_theorem},
        {"lambda_hat_chain", e.lambda_hat_chain},
        {"lambda_hat_selected", e.lambda_hat_selected},
        {"lambda_unscaled", e.lambda_unscaled},
        {"residual_theorem", e.residual_theorem},
        {"residual_chain", e.residual_chain},
    };
    if (report.numeric) j["lambda_hat_numeric"] = e.lambda_hat_numeric;
    pairs.push_back(std::move(j));
  }
  return {
      {"params", to_json(report.params)},
      {"selected", to_string(report.selected)},
      {"formulas_agree", report.selected == Formula::Both},
      {"pairs", pairs},
  };
}

json provenance(const RunConfig& config, const Params& params) {
  return {{"tool_version", kToolVersion}, {"config", to_json(config)}, {"params", to_json(params)}};
}

void write_orbit_csv(std::ostream& out, const Orbit& orbit) {
  out << kCsvHeader << '\n';
  for (const auto& s : orbit.samples) {
    const ProfileState& st = s.state;
    out << g17(st.x) << ',' << g17(st.h) << ',' << g17(st.dh) << ',' << g17(s.a_val) << ',' << g17(s.w_val)
        << ',' << g17(s.theta) << ',' << g17(s.rho) << ',' << g17(t_of_x(st.x)) << ','
        << g17(st.h + kPi / 2) << '\n';
  }
}

void write_r_profile_csv(std::ostream& out, const RProfile& profile) {
  out << "t,r,dr,ddr\n";
  for (const auto& s : profile.samples) {
    out << g17(s.t) << ',' << g17(s.r) << ',' << g17(s.dr) << ',' << g17(s.ddr) << '\n';
  }
}

std::vector<OrbitSample> read_orbit_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("profile CSV: header must be '" + std::string(kCsvHeader) + "'");
  }
  std::vector<OrbitSample> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    double v[9];
    std::istringstream fields(line);
    std::string cell;
    int n = 0;
    while (std::getline(fields, cell, ',')) {
      if (n >= 9) break;
      try {
        std::size_t used = 0;
        v[n] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw std::runtime_error("profile CSV: malformed value on row " + std::to_string(row));
      }
      ++n;
    }
    if (n != 9 || fields.rdbuf()->in_avail() > 0) {
      throw std::runtime_error("profile CSV: row " + std::to_string(row) + " must have 9 fields");
    }
    OrbitSample s;
    s.state = {v[0], v[1], v[2]};
    s.a_val = v[3];
    s.w_val = v[4];
    s.theta = v[5];
    s.rho = v[6];
    out.push_back(s);
  }
  return out;
}

OrbitOutcome outcome_from_samples(const std::vector<OrbitSample>& samples, Classification classification) {
  OrbitOutcome out;
  out.classification = classification;
  if (samples.empty()) return out;
  out.x_e = samples.back().state.x;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (detail::crosses(samples[i - 1].state.h, samples[i].state.h)) ++out.zero_count;
  }
  double theta_end = samples.back().theta;
  if (classification == Classification::ConvergedPlus) theta_end = unwrap_angle(theta_end, kPi / 2, 0.0);
  if (classification == Classification::ConvergedMinus) theta_end = unwrap_angle(theta_end, -kPi / 2, 0.0);
  out.omega = -(theta_end - samples.front().theta) / kPi;
  return out;
}

Classification classification_from_string(const std::string& name) {
  for (auto c : {Classification::ExitPlus, Classification::ExitMinus, Classification::ConvergedPlus,
                 Classification::ConvergedMinus, Classification::Undecided}) {
    if (name == to_string(c)) return c;
  }
  throw std::invalid_argument("unknown classification '" + name + "'");
}

}  // namespace pharm
