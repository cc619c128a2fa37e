#include "pharm/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pharm {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ZeroOfH: return "ZeroOfH";
    case EventKind::ZeroOfDh: return "ZeroOfDh";
    case EventKind::ExitGamma: return "ExitGamma";
    case EventKind::Converged: return "Converged";
    case EventKind::Truncated: return "Truncated";
  }
  return "Unknown";
}

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("abs_tol must be positive");
  if (!(x_max > 1.0)) throw std::invalid_argument("x_max must exceed 1");
  if (max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
  if (!(event_tol > 0.0)) throw std::invalid_argument("event_tol must be positive");
  if (!(convergence_eps >= 0.0)) throw std::invalid_argument("convergence_eps must be non-negative");
  if (!(fixed_step >= 0.0)) throw std::invalid_argument("fixed_step must be non-negative");
}

int Orbit::count(EventKind kind) const {
  return static_cast<int>(std::count_if(events.begin(), events.end(),
                                        [kind](const OrbitEvent& e) { return e.kind == kind; }));
}

namespace {

template <typename Scalar>
Orbit assemble(const detail::RawOrbit<Scalar>& raw, const Params& params) {
  Orbit orbit;
  orbit.params = params;
  orbit.samples.reserve(raw.states.size());
  double theta = 0.0;
  bool first = true;
  for (const auto& s : raw.states) {
    const ProfileState st{static_cast<double>(s.x), static_cast<double>(s.h), static_cast<double>(s.dh)};
    theta = first ? std::atan2(st.dh, st.h) : unwrap_angle(theta, st.h, st.dh);
    first = false;
    orbit.samples.push_back(make_sample(st, params, theta));
  }
  for (const auto& e : raw.events) {
    orbit.events.push_back({static_cast<double>(e.x), e.kind, e.sign, ""});
  }
  orbit.events.back().detail = raw.detail;
  if (orbit.terminal().kind == EventKind::Converged) {
    orbit.tail = StableTail::from_anchor(orbit.samples.back().state, orbit.terminal().sign);
  }
  return orbit;
}

}  // namespace

Orbit assemble_orbit(const detail::RawOrbit<double>& raw, const Params& params) { return assemble(raw, params); }

Orbit assemble_orbit(const detail::RawOrbit<long double>& raw, const Params& params) {
  return assemble(raw, params);
}

Orbit integrate_orbit(const ProfileState& initial, const Params& params, const IntegratorConfig& config) {
  config.validate();
  if (initial.x != 0.0) throw std::invalid_argument("integrate_orbit: initial.x must be 0");
  if (config.precision == Precision::Extended) {
    const ProfileStateT<long double> init{initial.x, initial.h, initial.dh};
    return assemble(detail::integrate_raw<long double>(init, params, config), params);
  }
  return assemble(detail::integrate_raw<double>(initial, params, config), params);
}

ProfileState evaluate(const Orbit& orbit, double x) {
  const auto& s = orbit.samples;
  if (s.empty()) throw std::invalid_argument("evaluate: empty orbit");
  if (x <= s.front().state.x) return s.front().state;
  if (x >= s.back().state.x) {
    if (orbit.tail) return orbit.tail->at(x);
    return s.back().state;
  }
  const auto it = std::upper_bound(s.begin(), s.end(), x,
                                   [](double v, const OrbitSample& smp) { return v < smp.state.x; });
  const ProfileState& left = std::prev(it)->state;
  if (x == left.x) return left;
  const Phase<double> y = left.phase();
  const Phase<double> k1 = el_rhs<double>(left.x, y, orbit.params);
  const Phase<double> z = detail::step_to<double>(left.x, y, k1, x - left.x, orbit.params);
  return {x, z(0), z(1)};
}

double energy_error_estimate(const Orbit& orbit, const Params& params) {
  // Quintic Hermite through (h, h', h'') on each step, residual checked at the midpoint.
  double worst = 0.0;
  const auto& s = orbit.samples;
  const auto ddh = [&](const ProfileState& st) -> double {
    try {
      return el_rhs(st, params)(1);
    } catch (const NumericError&) {
      return 0.0;
    }
  };
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const ProfileState& a = s[i].state;
    const ProfileState& b = s[i + 1].state;
    const double len = b.x - a.x;
    if (!(len > 1e-9)) continue;
    const double f0 = a.h, f1 = b.h;
    const double d0 = a.dh * len, d1 = b.dh * len;
    const double s0 = ddh(a) * len * len, s1 = ddh(b) * len * len;
    // Values of the quintic Hermite interpolant and its derivatives at the midpoint.
    const double hm = 0.5 * (f0 + f1) + 0.15625 * (d0 - d1) + 0.015625 * (s0 + s1);
    const double dhm = (1.875 * (f1 - f0) - 0.4375 * (d0 + d1) + 0.03125 * (s1 - s0)) / len;
    const double ddhm = (-1.5 * (d0 - d1) - 0.25 * (s0 + s1)) / (len * len);
    const ProfileState mid{a.x + 0.5 * len, hm, dhm};
    double rhs = 0.0;
    try {
      rhs = el_rhs(mid, params)(1);
    } catch (const NumericError&) {
      continue;
    }
    const double r = std::abs(ddhm - rhs);
    if (std::isfinite(r)) worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace pharm
