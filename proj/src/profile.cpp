#include "pharm/profile.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pharm/integrate.hpp"

namespace pharm {

namespace {
constexpr double kPi = std::numbers::pi;
}

double t_of_x(double x) { return 2.0 * std::atan(std::exp(x)); }

double x_of_t(double t) {
  if (!(t > 0.0 && t < kPi)) throw std::domain_error("x_of_t: t must lie strictly inside (0, pi)");
  return std::log(std::tan(0.5 * t));
}

ProfileState identity_profile(double x) {
  // gd(x) = 2 atan(e^x) - pi/2 = atan(sinh x); the latter keeps full precision near h = 0.
  return {x, std::atan(std::sinh(x)), 1.0 / std::cosh(x)};
}

double identity_profile_ddh(double x) { return -std::tanh(x) / std::cosh(x); }

OrbitSample make_sample(const ProfileState& state, const Params& params, double theta) {
  OrbitSample s;
  s.state = state;
  s.a_val = a_value(state, params);
  s.w_val = lyapunov_w(state, params);
  s.theta = theta;
  s.rho = std::hypot(state.h, state.dh);
  return s;
}

double unwrap_angle(double previous, double h, double dh) {
  const double raw = std::atan2(dh, h);
  return raw + 2.0 * kPi * std::round((previous - raw) / (2.0 * kPi));
}

void StableTail::split(double u, double du, int m, double& stable, double& unstable) {
  unstable = (u + du) / m;
  stable = u - unstable;
}

StableTail StableTail::from_anchor(const ProfileState& anchor, int sign) {
  const double u = anchor.h - sign * kPi / 2;
  StableTail tail;
  tail.x0 = anchor.x;
  tail.sign = sign;
  tail.correction = -(u + anchor.dh) / 2;
  tail.amplitude = u - tail.correction;
  return tail;
}

ProfileState StableTail::at(double x) const {
  const double e = std::exp(-(x - x0));
  const double u = e * (amplitude + correction * e * e);
  const double du = -e * (amplitude + 3.0 * correction * e * e);
  return {x, sign * kPi / 2 + u, du};
}

double bvp_residual(double t, double r, double dr, double ddr, const Params& params) {
  const double m1 = params.m - 1;
  const double st = std::sin(t);
  const double cot = std::cos(t) / st;
  const double sr = std::sin(r);
  const double sin2r_term = std::sin(2.0 * r) / (2.0 * st * st);
  const double ratio = sr * sr / (st * st);
  const double denom = dr * dr + m1 * ratio;
  double res = ddr + m1 * cot * dr - m1 * sin2r_term;
  if (params.p != 2.0) {
    res += (params.p - 2.0) * dr * (dr * ddr + m1 * dr * sin2r_term - m1 * ratio * cot) / denom;
  }
  return res;
}

namespace {

RSample r_sample_from(const ProfileState& s, const Params& params, double ddh) {
  // t = 2 atan(e^x): dt/dx = sech x, so r' = h' cosh x and r'' = (h'' cosh x + h' sinh x) cosh x.
  const double ch = std::cosh(s.x);
  RSample out;
  out.t = t_of_x(s.x);
  out.r = s.h + kPi / 2;
  out.dr = s.dh * ch;
  out.ddr = (ddh * ch + s.dh * std::sinh(s.x)) * ch;
  (void)params;
  return out;
}

double ddh_at(const ProfileState& s, const Params& params) {
  try {
    return el_rhs(s, params)(1);
  } catch (const NumericError&) {
    return 0.0;
  }
}

}  // namespace

RProfile to_r_profile(const Orbit& orbit, Symmetry symmetry, const Params& params) {
  if (orbit.events.empty() || orbit.samples.empty()) throw std::invalid_argument("to_r_profile: empty orbit");
  const EventKind kind = orbit.terminal().kind;
  if (kind != EventKind::Converged && kind != EventKind::ExitGamma) {
    throw std::invalid_argument("to_r_profile: orbit has no boundary value (not converged, not exited)");
  }

  // Half-line states for x >= 0, continued along the tail to x = 30, where 1 - t/pi is still
  // resolved in double precision and |u| has dropped by e^{-30 + x_end}.
  std::vector<ProfileState> half;
  half.reserve(orbit.samples.size() + 640);
  for (const auto& s : orbit.samples) half.push_back(s.state);
  constexpr double kTailEnd = 30.0;
  if (orbit.tail && half.back().x < kTailEnd) {
    const double x_end = half.back().x;
    const int n = std::max(8, static_cast<int>(std::ceil((kTailEnd - x_end) / 0.05)));
    for (int i = 1; i <= n; ++i) half.push_back(orbit.tail->at(x_end + (kTailEnd - x_end) * i / n));
  }

  std::vector<ProfileState> full;
  full.reserve(2 * half.size());
  const bool odd = symmetry == Symmetry::Odd;
  for (auto it = half.rbegin(); it != half.rend(); ++it) {
    if (it->x <= 0.0) continue;
    full.push_back({-it->x, odd ? -it->h : it->h, odd ? it->dh : -it->dh});
  }
  for (const auto& s : half) full.push_back(s);

  RProfile out;
  const double r_end = half.back().h + kPi / 2;
  const double r_start = (odd ? -half.back().h : half.back().h) + kPi / 2;
  out.k_end = static_cast<int>(std::lround(r_end / kPi));

  // Pole limits: r' at the poles is read off the outermost samples (r ~ r0 + c t).
  RSample first{0.0, kind == EventKind::Converged ? std::round(r_start / kPi) * kPi : r_start, 0.0, 0.0};
  out.samples.push_back(first);
  for (const auto& s : full) {
    RSample rs = r_sample_from(s, params, ddh_at(s, params));
    if (rs.t <= out.samples.back().t) continue;
    if (rs.t >= kPi) break;
    out.samples.push_back(rs);
  }
  out.samples.front().dr = out.samples.size() > 1 ? out.samples[1].dr : 0.0;
  RSample last{kPi, kind == EventKind::Converged ? out.k_end * kPi : r_end, out.samples.back().dr, 0.0};
  out.samples.push_back(last);
  return out;
}

}  // namespace pharm
