#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pharm/integrate.hpp"
#include "pharm/model.hpp"
#include "pharm/numerics.hpp"
#include "pharm/profile.hpp"

namespace pharm {

/// Profile known on x >= 0 and extended to the line by its reflection symmetry.
struct HalfProfile {
  std::function<ProfileState(double)> eval;  // valid for x >= 0
  std::vector<double> breakpoints;           // quadrature partition of [0, x_end]
  std::optional<StableTail> tail;            // continuation beyond x_end
  Symmetry symmetry = Symmetry::Odd;

  static HalfProfile from_orbit(const Orbit& orbit, Symmetry symmetry);
  static HalfProfile identity(double x_end = 40.0, double panel = 0.25);
  static HalfProfile constant(double h, double x_end = 40.0);

  double x_end() const { return breakpoints.back(); }
  ProfileState at(double x) const;
};

struct EnergyReport {
  double value_x_chart = 0.0;
  double value_t_chart = 0.0;
  double quadrature_error = 0.0;
};

/// E_p = (1/p) int (h'^2 + (m-1) cos^2 h)^{p/2} cosh^{p-m}(x) dx over the real line.
/// Throws NumericError(TailNotConverged) unless the profile ends within 1e-6 of +-pi/2.
double energy_x(const HalfProfile& profile, const Params& params, double* error_estimate = nullptr);

/// E_p = (1/p) int_0^pi (r'^2 + (m-1) sin^2 r / sin^2 t)^{p/2} sin^{m-1} t dt.
/// Throws NumericError(PoleSingularity) when r(0) is not 0 within 1e-6.
double energy_t(const RProfile& profile, const Params& params, double* error_estimate = nullptr);

EnergyReport energy_report(const HalfProfile& profile, const RProfile& r_profile, const Params& params);

/// (1/p) m^{p/2} sqrt(pi) Gamma(m/2) / Gamma((m+1)/2), the energy of the identity.
double identity_energy_closed(const Params& params);

/// Second variation Q(xi) at a critical profile, evaluated from the displayed form
///   -int xi A^{p/2-1} [xi'' + (p-m) tanh xi' + (m-1) cos 2h xi + (p-2)/2 xi' (log A)'
///                      + (p-2) h' ((h' xi' - (m-1)/2 sin 2h xi) / A)'] cosh^{p-m} dx
/// with fourth-order differences on `grid`. Throws NumericError(NonCriticalProfile) when the
/// profile residual exceeds 1e-4.
double second_variation(const HalfProfile& profile, std::span<const double> xi, const UniformGrid& grid,
                        const Params& params);

/// Bilinear form Q(xi, eta) = -int eta A^{p/2-1} [L xi] cosh^{p-m} dx; Q(xi) = Q(xi, xi).
double second_variation_bilinear(const HalfProfile& profile, std::span<const double> xi,
                                 std::span<const double> eta, const UniformGrid& grid, const Params& params);

/// Max residual of the reduced equation along the profile on `grid` (h'' by differences).
double profile_residual(const HalfProfile& profile, const UniformGrid& grid, const Params& params);

}  // namespace pharm
