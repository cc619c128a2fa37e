#pragma once

#include <string>
#include <vector>

#include "pharm/io.hpp"

namespace pharm {

/// Inclusive range "a:b" or "a:b:step" (step defaults to 1).
std::vector<double> parse_range(const std::string& text);

/// Cartesian product of p and m values, invalid pairs dropped, sorted by (p, m).
std::vector<Params> atlas_grid(const std::vector<double>& ps, const std::vector<double>& ms);

/// One JSON line per (p, m, k), k = 1..k_max, in (p, m, k) order. Cells are solved on up to
/// `jobs` threads; the output does not depend on `jobs`.
std::vector<std::string> run_atlas(const std::vector<Params>& grid, int k_max, const RunConfig& config,
                                   int jobs);

}  // namespace pharm
