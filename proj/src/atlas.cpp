#include "pharm/atlas.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pharm/numerics.hpp"

namespace pharm {

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    const std::string piece = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw std::invalid_argument("range '" + text + "' must look like a:b or a:b:step");
    }
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() > 3) throw std::invalid_argument("range '" + text + "' has too many fields");
  const double lo = parts[0];
  const double hi = parts[1];
  const double step = parts.size() == 3 ? parts[2] : 1.0;
  if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("range '" + text + "' is empty or has a bad step");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

std::vector<Params> atlas_grid(const std::vector<double>& ps, const std::vector<double>& ms) {
  std::vector<Params> out;
  for (double p : ps) {
    for (double m : ms) {
      try {
        out.push_back(validate_params(p, m));
      } catch (const std::invalid_argument&) {
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Params& a, const Params& b) {
    return a.p != b.p ? a.p < b.p : a.m < b.m;
  });
  return out;
}

std::vector<std::string> run_atlas(const std::vector<Params>& grid, int k_max, const RunConfig& config,
                                   int jobs) {
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  const std::size_t per_cell = static_cast<std::size_t>(k_max);
  std::vector<std::string> lines(grid.size() * per_cell);
  parallel_for(lines.size(), jobs, [&](std::size_t i) {
    const Params& params = grid[i / per_cell];
    const int k = static_cast<int>(i % per_cell) + 1;
    const RegimeReport reg = regime(params);
    nlohmann::json j = {
        {"p", params.p},
        {"m", params.m},
        {"k", k},
        {"regime", to_string(reg.regime)},
        {"in_existence_window", in_existence_window(params)},
    };
    std::string status = "ok";
    try {
      const ShootResult r = find_bk(params, k, config.b_tol, config.integrator);
      j["b_k"] = r.b_k;
      j["bracket_width"] = r.bracket_width;
      j["omega"] = r.outcome.omega;
      j["classification"] = to_string(r.outcome.classification);
      j["energy"] = r.energy;
    } catch (const NumericError& e) {
      status = to_string(e.kind());
      j["reason"] = e.what();
    }
    j["status"] = status;
    j["k" + std::to_string(k)] = status;
    j["tool_version"] = kToolVersion;
    j["config"] = to_json(config);
    lines[i] = j.dump();
  });
  return lines;
}

}  // namespace pharm
