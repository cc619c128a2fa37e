#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "pharm/errors.hpp"
#include "pharm/model.hpp"

namespace pharm {

/// Phase-space point (h, h') of the reduced equation.
template <typename Scalar>
using Phase = Eigen::Matrix<Scalar, 2, 1>;

/// Pointwise profile data in the x-chart, where t = 2 atan(e^x) and h = r - pi/2.
template <typename Scalar>
struct ProfileStateT {
  Scalar x{0};
  Scalar h{0};
  Scalar dh{0};

  Phase<Scalar> phase() const { return Phase<Scalar>(h, dh); }
};

using ProfileState = ProfileStateT<double>;

inline constexpr double kDefaultDegeneracyFloor = 1e-14;

double t_of_x(double x);

/// Throws std::domain_error unless 0 < t < pi.
double x_of_t(double t);

/// Vector field (h', h'') of the reduced Euler-Lagrange equation
///
///   h'' = -(p-m) tanh(x) A/D h' - (m-1)/2 ((3-p) h'^2 + (m-1) cos^2 h)/D sin(2h),
///
/// with A = h'^2 + (m-1) cos^2 h and D = (p-1) h'^2 + (m-1) cos^2 h.
/// D vanishes only at (pi/2 + k pi, 0); below `floor` a DegeneratePoint error is raised.
template <typename Scalar>
Phase<Scalar> el_rhs(Scalar x, const Phase<Scalar>& y, const Params& params,
                     Scalar floor = Scalar(kDefaultDegeneracyFloor)) {
  using std::cos;
  using std::sin;
  using std::tanh;
  const Scalar p(params.p);
  const Scalar m1(params.m - 1);
  const Scalar h = y(0);
  const Scalar dh = y(1);
  const Scalar c = cos(h);
  const Scalar dh2 = dh * dh;
  const Scalar cos_term = m1 * c * c;
  const Scalar denom = (p - 1) * dh2 + cos_term;
  if (!(denom >= floor)) {
    throw NumericError(ErrorKind::DegeneratePoint, "el_rhs: degenerate denominator at a fixed point");
  }
  const Scalar friction = (p - Scalar(params.m)) * tanh(x) * (dh2 + cos_term) / denom;
  const Scalar restoring = Scalar(0.5) * m1 * ((3 - p) * dh2 + cos_term) / denom;
  return Phase<Scalar>(dh, -friction * dh - restoring * sin(2 * h));
}

template <typename Scalar>
Phase<Scalar> el_rhs(const ProfileStateT<Scalar>& state, const Params& params) {
  return el_rhs<Scalar>(state.x, state.phase(), params);
}

/// A = h'^2 + (m-1) cos^2 h.
template <typename Scalar>
Scalar a_value(const ProfileStateT<Scalar>& s, const Params& params) {
  using std::cos;
  const Scalar c = cos(s.h);
  return s.dh * s.dh + Scalar(params.m - 1) * c * c;
}

/// Lyapunov function W = A^{p/2-1} ((p-1) h'^2 - (m-1) cos^2 h).
template <typename Scalar>
Scalar lyapunov_w(const ProfileStateT<Scalar>& s, const Params& params) {
  using std::cos;
  using std::pow;
  const Scalar c = cos(s.h);
  const Scalar cos_term = Scalar(params.m - 1) * c * c;
  const Scalar a = s.dh * s.dh + cos_term;
  return pow(a, Scalar(params.p / 2 - 1)) * (Scalar(params.p - 1) * s.dh * s.dh - cos_term);
}

/// Closed-form derivative W' = p (m-p) A^{p/2-1} tanh(x) h'^2 along solutions.
template <typename Scalar>
Scalar lyapunov_w_rate(const ProfileStateT<Scalar>& s, const Params& params) {
  using std::pow;
  using std::tanh;
  return Scalar(params.p * (params.m - params.p)) * pow(a_value(s, params), Scalar(params.p / 2 - 1)) *
         tanh(s.x) * s.dh * s.dh;
}

/// Gudermannian profile h = 2 atan(e^x) - pi/2, the identity map in the x-chart.
ProfileState identity_profile(double x);

/// Second derivative of the identity profile, -tanh(x) sech(x).
double identity_profile_ddh(double x);

/// Sample of an integrated orbit enriched with the derived quantities.
struct OrbitSample {
  ProfileState state;
  double a_val = 0.0;
  double w_val = 0.0;
  double theta = 0.0;  // unwrapped polar angle of (h, h')
  double rho = 0.0;
};

OrbitSample make_sample(const ProfileState& state, const Params& params, double theta);

/// atan2(dh, h) moved onto the branch closest to `previous`.
double unwrap_angle(double previous, double h, double dh);

/// Decay of a converged orbit towards (s pi/2, 0).
///
/// Near the fixed point the rays h' = -u and h' = (m-1) u (u = h - s pi/2) are invariant
/// for the limiting equation; the first one carries every connecting orbit (rate e^{-x}),
/// the second one is the unstable direction. The tail u = a e^{-(x-x0)} + c e^{-3(x-x0)}
/// matches h and h' at the anchor; the second term absorbs the cubic correction.
struct StableTail {
  double x0 = 0.0;
  double amplitude = 0.0;   // a
  double correction = 0.0;  // c
  int sign = 1;             // limit h -> sign * pi/2

  static StableTail from_anchor(const ProfileState& anchor, int sign);

  /// Stable/unstable split u = a + c, u' = -a + (m-1) c of a point near the fixed point.
  static void split(double u, double du, int m, double& stable, double& unstable);

  ProfileState at(double x) const;
};

/// Residual of the t-chart Euler-Lagrange equation for r(t) with derivatives dr, ddr.
double bvp_residual(double t, double r, double dr, double ddr, const Params& params);

/// r-profile of a self-map on the colatitude interval [0, pi].
struct RSample {
  double t = 0.0;
  double r = 0.0;
  double dr = 0.0;   // dr/dt
  double ddr = 0.0;  // d^2 r/dt^2
};

struct RProfile {
  std::vector<RSample> samples;
  int k_end = 0;  // r(pi) = k_end * pi
};

enum class Symmetry { Odd, Even };

struct Orbit;

/// Extends an orbit on [0, X] to the real line by `symmetry`, maps it to the t-chart and
/// appends the pole values. Converged orbits are continued along their StableTail.
/// Throws std::invalid_argument for orbits that neither converged nor exited.
RProfile to_r_profile(const Orbit& orbit, Symmetry symmetry, const Params& params);

}  // namespace pharm
