#include "pharm/energy.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace pharm {

namespace {

constexpr double kPi = std::numbers::pi;

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// h'' from the equation, or 0 where the vector field is degenerate (the fixed points).
double ddh_or_zero(const ProfileState& s, const Params& params) {
  try {
    const double v = el_rhs<double>(s.x, s.phase(), params, 1e-300)(1);
    return std::isfinite(v) ? v : 0.0;
  } catch (const NumericError&) {
    return 0.0;
  }
}

}  // namespace

HalfProfile HalfProfile::from_orbit(const Orbit& orbit, Symmetry symmetry) {
  if (orbit.samples.empty()) throw std::invalid_argument("HalfProfile: empty orbit");
  auto shared = std::make_shared<const Orbit>(orbit);
  HalfProfile out;
  out.eval = [shared](double x) { return evaluate(*shared, x); };
  for (const auto& s : orbit.samples) {
    if (out.breakpoints.empty() || s.state.x > out.breakpoints.back()) out.breakpoints.push_back(s.state.x);
  }
  if (out.breakpoints.size() < 2) throw std::invalid_argument("HalfProfile: orbit has a single sample");
  out.tail = orbit.tail;
  out.symmetry = symmetry;
  return out;
}

HalfProfile HalfProfile::identity(double x_end, double panel) {
  HalfProfile out;
  out.eval = [](double x) { return identity_profile(x); };
  const int n = std::max(1, static_cast<int>(std::ceil(x_end / panel)));
  for (int i = 0; i <= n; ++i) out.breakpoints.push_back(x_end * i / n);
  out.symmetry = Symmetry::Odd;
  return out;
}

HalfProfile HalfProfile::constant(double h, double x_end) {
  HalfProfile out;
  out.eval = [h](double x) { return ProfileState{x, h, 0.0}; };
  const int n = std::max(1, static_cast<int>(std::ceil(x_end)));
  for (int i = 0; i <= n; ++i) out.breakpoints.push_back(x_end * i / n);
  out.symmetry = Symmetry::Even;
  return out;
}

ProfileState HalfProfile::at(double x) const {
  if (x < 0.0) {
    const ProfileState s = at(-x);
    if (symmetry == Symmetry::Odd) return {x, -s.h, s.dh};
    return {x, s.h, -s.dh};
  }
  if (tail && x > x_end()) return tail->at(x);
  return eval(x);
}

double energy_x(const HalfProfile& profile, const Params& params, double* error_estimate) {
  const ProfileState end = profile.at(profile.x_end());
  if (!profile.tail && !(std::abs(std::abs(end.h) - kPi / 2) <= 1e-6)) {
    throw NumericError(ErrorKind::TailNotConverged, "energy_x: profile does not end within 1e-6 of +-pi/2");
  }
  const double p = params.p;
  const double m = params.m;
  const auto density = [&](double x) {
    const ProfileState s = profile.at(x);
    const double a = a_value(s, params);
    if (a <= 0.0) return 0.0;
    return std::exp(0.5 * p * std::log(a) + (p - m) * log_cosh(x)) / p;
  };

  std::vector<double> cuts = profile.breakpoints;
  if (profile.tail) {
    // The stable tail decays like e^{-x}; the density then like e^{-m x}.
    const double start = cuts.back();
    for (int i = 1; i <= 40; ++i) cuts.push_back(start + i);
  }
  const QuadratureResult q = integrate_partition(density, cuts, 1e-14);
  const double remainder = density(cuts.back()) / std::max(1.0, m - p);
  if (error_estimate) *error_estimate = 2.0 * (q.error + remainder);
  return 2.0 * q.value;
}

double energy_t(const RProfile& profile, const Params& params, double* error_estimate) {
  const auto& s = profile.samples;
  if (s.size() < 4) throw std::invalid_argument("energy_t: profile needs at least four samples");
  // r(0) = 0 up to the symmetry r -> r + k pi, which leaves the density unchanged.
  if (!(std::abs(s.front().r - kPi * std::round(s.front().r / kPi)) <= 1e-6)) {
    throw NumericError(ErrorKind::PoleSingularity, "energy_t: r(0) is not a multiple of pi");
  }
  const double p = params.p;
  const int m = params.m;
  const double m1 = m - 1;

  const auto density = [&](double t, double r, double dr) {
    const double st = std::sin(t);
    const double sr = std::sin(r);
    const double a = dr * dr + m1 * (sr * sr) / (st * st);
    if (a <= 0.0) return 0.0;
    return std::pow(a, 0.5 * p) * std::pow(st, m - 1) / p;
  };

  // Interior: quintic Hermite of r through (r, r', r'') on each sample interval.
  const std::size_t lo = 1;
  const std::size_t hi = s.size() - 2;
  std::vector<double> cuts;
  cuts.reserve(hi - lo + 1);
  for (std::size_t i = lo; i <= hi; ++i) cuts.push_back(s[i].t);
  const auto integrand = [&](double t) {
    auto it = std::upper_bound(cuts.begin(), cuts.end(), t);
    std::size_t i = lo + static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - cuts.begin() - 1));
    i = std::min(i, hi - 1);
    const RSample& a = s[i];
    const RSample& b = s[i + 1];
    const QuinticHermite spline(a.t, b.t, a.r, a.dr, a.ddr, b.r, b.dr, b.ddr);
    return density(t, spline.value(t), spline.deriv(t));
  };
  const QuadratureResult q = integrate_partition(integrand, cuts, 1e-14);

  // Pole caps: r ~ r' t near t = 0 (and near pi), so the density is (m r'^2)^{p/2} t^{m-1} / p.
  const auto cap = [&](double width, double dr) { return std::pow(m * dr * dr, 0.5 * p) * std::pow(width, m) / (m * p); };
  const double caps = cap(s[lo].t, s[lo].dr) + cap(kPi - s[hi].t, s[hi].dr);
  if (error_estimate) *error_estimate = q.error + 1e-3 * caps;
  return q.value + caps;
}

EnergyReport energy_report(const HalfProfile& profile, const RProfile& r_profile, const Params& params) {
  EnergyReport out;
  double ex = 0.0;
  double et = 0.0;
  out.value_x_chart = energy_x(profile, params, &ex);
  out.value_t_chart = energy_t(r_profile, params, &et);
  out.quadrature_error = ex + et;
  return out;
}

double identity_energy_closed(const Params& params) {
  const double m = params.m;
  return std::pow(m, 0.5 * params.p) * std::sqrt(kPi) *
         std::exp(std::lgamma(0.5 * m) - std::lgamma(0.5 * (m + 1))) / params.p;
}

namespace {

struct ProfileOnGrid {
  Eigen::VectorXd h, dh, ddh, a;
};

ProfileOnGrid profile_on(const HalfProfile& profile, const UniformGrid& grid, const Params& params) {
  ProfileOnGrid g{Eigen::VectorXd(grid.n), Eigen::VectorXd(grid.n), Eigen::VectorXd(grid.n),
                  Eigen::VectorXd(grid.n)};
  for (int i = 0; i < grid.n; ++i) {
    const ProfileState s = profile.at(grid.x(i));
    g.h(i) = s.h;
    g.dh(i) = s.dh;
    g.ddh(i) = ddh_or_zero(s, params);
    g.a(i) = a_value(s, params);
  }
  return g;
}

double residual_on(const ProfileOnGrid& g, double dx) {
  const Eigen::VectorXd fd = diff1(g.dh, dx);
  double worst = 0.0;
  // The outer two nodes use one-sided stencils; they are checked like the rest.
  for (Eigen::Index i = 0; i < fd.size(); ++i) worst = std::max(worst, std::abs(fd(i) - g.ddh(i)));
  return worst;
}

}  // namespace

double profile_residual(const HalfProfile& profile, const UniformGrid& grid, const Params& params) {
  return residual_on(profile_on(profile, grid, params), grid.dx);
}

double second_variation_bilinear(const HalfProfile& profile, std::span<const double> xi,
                                 std::span<const double> eta, const UniformGrid& grid, const Params& params) {
  if (static_cast<int>(xi.size()) != grid.n || static_cast<int>(eta.size()) != grid.n) {
    throw std::invalid_argument("second_variation: direction samples do not match the grid");
  }
  if (grid.n < 7) throw std::invalid_argument("second_variation: grid needs at least seven nodes");
  const ProfileOnGrid g = profile_on(profile, grid, params);
  const double res = residual_on(g, grid.dx);
  if (!(res <= 1e-4)) {
    throw NumericError(ErrorKind::NonCriticalProfile,
                       "second_variation: profile residual " + std::to_string(res) + " exceeds 1e-4");
  }
  const double p = params.p;
  const double m = params.m;
  const double m1 = m - 1;
  const Eigen::Map<const Eigen::VectorXd> u(xi.data(), grid.n);
  const Eigen::VectorXd du = diff1(u, grid.dx);
  const Eigen::VectorXd ddu = diff2(u, grid.dx);

  Eigen::VectorXd inner(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double s2h = std::sin(2.0 * g.h(i));
    inner(i) = (g.dh(i) * du(i) - 0.5 * m1 * s2h * u(i)) / g.a(i);
  }
  const Eigen::VectorXd d_inner = diff1(inner, grid.dx);

  Eigen::VectorXd integrand(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    const double h = g.h(i);
    const double dh = g.dh(i);
    const double a = g.a(i);
    const double da = 2.0 * dh * g.ddh(i) - m1 * std::sin(2.0 * h) * dh;
    const double lxi = ddu(i) + (p - m) * std::tanh(x) * du(i) + m1 * std::cos(2.0 * h) * u(i) +
                       0.5 * (p - 2.0) * du(i) * da / a + (p - 2.0) * dh * d_inner(i);
    const double weight = std::exp((0.5 * p - 1.0) * std::log(a) + (p - m) * log_cosh(x));
    integrand(i) = -eta[i] * weight * lxi;
  }
  return simpson(integrand, grid.dx);
}

double second_variation(const HalfProfile& profile, std::span<const double> xi, const UniformGrid& grid,
                        const Params& params) {
  return second_variation_bilinear(profile, xi, xi, grid, params);
}

}  // namespace pharm
