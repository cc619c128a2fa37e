#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pharm/energy.hpp"
#include "pharm/integrate.hpp"
#include "pharm/model.hpp"
#include "pharm/shooting.hpp"
#include "pharm/spectrum.hpp"

namespace pharm {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kCsvHeader = "x,h,dh,A,W,theta,rho,t,r";

enum class OutputFormat { Json, Csv };

struct RunConfig {
  IntegratorConfig integrator;
  double b_tol = 1e-9;
  int j_max = 6;
  std::vector<Params> grid;
  std::string output_dir;
  OutputFormat format = OutputFormat::Csv;
};

/// Overlays the keys present in `j` onto `config`. Unknown keys and malformed values throw
/// std::invalid_argument.
void apply_config(RunConfig& config, const nlohmann::json& j);

/// Reads a JSON config file and overlays it onto the defaults.
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const Params& params);
nlohmann::json to_json(const RegimeReport& report);
nlohmann::json to_json(const OrbitOutcome& outcome);
nlohmann::json to_json(const ShootResult& result);
nlohmann::json to_json(const SpectrumReport& report);

/// {tool_version, config, params}: attached to every artifact.
nlohmann::json provenance(const RunConfig& config, const Params& params);

/// Profile CSV: the fixed header, one row per sample, %.17g, LF line endings.
void write_orbit_csv(std::ostream& out, const Orbit& orbit);

/// t,r,dr,ddr rows of a reconstructed solution.
void write_r_profile_csv(std::ostream& out, const RProfile& profile);

/// Parses a profile CSV written by write_orbit_csv; throws std::runtime_error on a bad header
/// or malformed row.
std::vector<OrbitSample> read_orbit_csv(std::istream& in);

/// Outcome recomputed from CSV rows: x_e is the last x, zero_count counts sign changes of h,
/// omega is taken from theta (at the limit point when `classification` is a converged one).
OrbitOutcome outcome_from_samples(const std::vector<OrbitSample>& samples, Classification classification);

Classification classification_from_string(const std::string& name);

}  // namespace pharm
