#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pharm/integrate.hpp"
#include "pharm/model.hpp"
#include "pharm/profile.hpp"

namespace pharm {

enum class OrbitKind { BOrbit, DOrbit };

/// b-orbit: h(0) = 0, h'(0) = b (odd). d-orbit: h(0) = d, h'(0) = 0 (even).
struct ShootSpec {
  OrbitKind kind = OrbitKind::BOrbit;
  double value = 1.0;

  /// Throws std::invalid_argument unless value > 0 (and value < pi/2 for d-orbits).
  void validate() const;
  ProfileState initial() const;
  Symmetry symmetry() const { return kind == OrbitKind::BOrbit ? Symmetry::Odd : Symmetry::Even; }
};

enum class Classification { ExitPlus, ExitMinus, ConvergedPlus, ConvergedMinus, Undecided };

const char* to_string(Classification c);

struct OrbitOutcome {
  Classification classification = Classification::Undecided;
  double x_e = 0.0;
  /// -(theta(x_e) - theta(0)) / pi; for converged orbits theta is taken at the limit point.
  double omega = 0.0;
  int zero_count = 0;
  std::string diagnostic;
};

OrbitOutcome classify(const Orbit& orbit);

struct OrbitRun {
  Orbit orbit;
  OrbitOutcome outcome;
};

/// Integrates and classifies; integrator failures come back as Undecided with a diagnostic.
OrbitRun run_orbit(const ShootSpec& spec, const Params& params, const IntegratorConfig& config);

/// sqrt((m-1)/(p-1)) (1 + 1e-6): the b-orbit starts with W(0) > 0 and exits monotonically.
double upper_bracket(const Params& params);

/// Zeros of h before exit for each b (b-orbits run without convergence detection).
/// Independent orbits are spread over `jobs` threads; the result order follows `bs`.
std::vector<int> scan_zero_counts(const Params& params, const std::vector<double>& bs,
                                  const IntegratorConfig& config, int jobs = 1);

struct ShootResult {
  Params params;
  int k = 1;
  double b_k = 0.0;
  /// Width of the adaptive-stage bracket; b_k itself is refined further.
  double bracket_width = 0.0;
  double b_adaptive = 0.0;
  Orbit orbit;
  OrbitOutcome outcome;
  RProfile solution;
  double energy = 0.0;
  std::vector<std::string> warnings;
};

/// Locates b_k, the boundary between b-orbits with k-1 zeros (above) and at least k zeros.
///
/// A geometric down-scan from upper_bracket finds the lower end, bisection on the zero count
/// narrows the bracket to b_tol, and a second bisection in extended precision on a fixed-step
/// flow pins the connecting orbit down before it is reconstructed.
/// Throws NumericError(BracketNotFound) or NumericError(NonConvergent).
ShootResult find_bk(const Params& params, int k, double b_tol, const IntegratorConfig& config);

struct CatalogueEntry {
  int k = 0;
  std::optional<ShootResult> result;
  std::optional<ErrorKind> error;
  std::string message;
};

/// find_bk for k = 1..k_max; failures are recorded per entry.
std::vector<CatalogueEntry> solve_catalogue(const Params& params, int k_max, double b_tol,
                                            const IntegratorConfig& config, int jobs = 1);

}  // namespace pharm
