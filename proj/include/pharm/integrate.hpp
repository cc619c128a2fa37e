#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pharm/profile.hpp"

namespace pharm {

enum class Precision { Double, Extended };

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double x_max = 50.0;
  std::int64_t max_steps = 1'000'000;
  double event_tol = 1e-12;
  /// Radius of the ball around (+-pi/2, 0) inside which an orbit may be declared converged.
  /// Zero disables convergence detection (orbits then run until exit or truncation).
  double convergence_eps = 0.2;
  /// Nonzero selects a fixed step; the flow map is then smooth in the initial data.
  double fixed_step = 0.0;
  Precision precision = Precision::Double;

  /// Throws std::invalid_argument on non-positive tolerances or x_max <= 1.
  void validate() const;
};

enum class EventKind { ZeroOfH, ZeroOfDh, ExitGamma, Converged, Truncated };

const char* to_string(EventKind kind);

struct OrbitEvent {
  double x = 0.0;
  EventKind kind = EventKind::Truncated;
  int sign = 0;  // +-1 for ExitGamma/Converged
  std::string detail;
};

/// Integrated orbit on [0, x_end].
struct Orbit {
  Params params;
  std::vector<OrbitSample> samples;
  std::vector<OrbitEvent> events;
  /// Present iff the terminal event is Converged.
  std::optional<StableTail> tail;

  const OrbitEvent& terminal() const { return events.back(); }
  int count(EventKind kind) const;
};

namespace detail {

/// Dormand-Prince 5(4) tableau.
struct Dopri5Tableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <typename Scalar>
struct StepResult {
  Phase<Scalar> y;
  Phase<Scalar> err;
  Phase<Scalar> k_end;  // f(x + h, y), reused as the first stage of the next step
};

/// One Dormand-Prince step of size h from (x, y) with f(x, y) = k1.
template <typename Scalar>
StepResult<Scalar> dopri5_step(Scalar x, const Phase<Scalar>& y, const Phase<Scalar>& k1, Scalar h,
                               const Params& params) {
  using T = Dopri5Tableau;
  const auto f = [&](Scalar xx, const Phase<Scalar>& yy) { return el_rhs<Scalar>(xx, yy, params); };
  const Phase<Scalar> k2 = f(x + Scalar(T::c2) * h, y + h * Scalar(T::a21) * k1);
  const Phase<Scalar> k3 = f(x + Scalar(T::c3) * h, y + h * (Scalar(T::a31) * k1 + Scalar(T::a32) * k2));
  const Phase<Scalar> k4 = f(x + Scalar(T::c4) * h,
                             y + h * (Scalar(T::a41) * k1 + Scalar(T::a42) * k2 + Scalar(T::a43) * k3));
  const Phase<Scalar> k5 =
      f(x + Scalar(T::c5) * h, y + h * (Scalar(T::a51) * k1 + Scalar(T::a52) * k2 + Scalar(T::a53) * k3 +
                                        Scalar(T::a54) * k4));
  const Phase<Scalar> k6 =
      f(x + h, y + h * (Scalar(T::a61) * k1 + Scalar(T::a62) * k2 + Scalar(T::a63) * k3 +
                        Scalar(T::a64) * k4 + Scalar(T::a65) * k5));
  StepResult<Scalar> out;
  out.y = y + h * (Scalar(T::b1) * k1 + Scalar(T::b3) * k3 + Scalar(T::b4) * k4 + Scalar(T::b5) * k5 +
                   Scalar(T::b6) * k6);
  out.k_end = f(x + h, out.y);
  out.err = h * (Scalar(T::e1) * k1 + Scalar(T::e3) * k3 + Scalar(T::e4) * k4 + Scalar(T::e5) * k5 +
                 Scalar(T::e6) * k6 + Scalar(T::e7) * out.k_end);
  return out;
}

/// State at x + tau reached by a single step from (x, y); tau may be any value in (0, h].
template <typename Scalar>
Phase<Scalar> step_to(Scalar x, const Phase<Scalar>& y, const Phase<Scalar>& k1, Scalar tau,
                      const Params& params) {
  return dopri5_step<Scalar>(x, y, k1, tau, params).y;
}

template <typename Scalar>
struct RawEvent {
  Scalar x;
  EventKind kind;
  int sign;
};

template <typename Scalar>
struct RawOrbit {
  std::vector<ProfileStateT<Scalar>> states;
  std::vector<RawEvent<Scalar>> events;
  std::string detail;  // diagnostic attached to the terminal event
};

template <typename Scalar>
bool crosses(Scalar a, Scalar b) {
  return (a < 0 && b >= 0) || (a > 0 && b <= 0);
}

/// Bisection for the first sign change of g(step_to(tau)) on (0, h].
template <typename Scalar, typename G>
Scalar locate(Scalar x, const Phase<Scalar>& y, const Phase<Scalar>& k1, Scalar h, const Params& params,
              Scalar tol, G&& g) {
  const Scalar g0 = g(y);
  Scalar lo = 0;
  Scalar hi = h;
  while (hi - lo > tol) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (crosses<Scalar>(g0, g(step_to<Scalar>(x, y, k1, mid, params)))) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Stable/unstable decomposition test used for convergence towards (s pi/2, 0).
template <typename Scalar>
bool settled(const Phase<Scalar>& y, int m, Scalar eps) {
  using std::abs;
  using std::hypot;
  const Scalar half_pi = std::numbers::pi_v<Scalar> / 2;
  if (y(0) == 0) return false;
  const int s = y(0) > 0 ? 1 : -1;
  const Scalar u = y(0) - s * half_pi;
  const Scalar du = y(1);
  if (!(hypot(u, du) < eps)) return false;
  // u = a + c, u' = -a + (m-1) c: a is carried by the stable ray, c by the unstable one.
  const Scalar c = (u + du) / Scalar(m);
  const Scalar a = u - c;
  return u * du < 0 && abs(c) >= abs(a * a * a) && abs(c) <= abs(a) / 2;
}

template <typename Scalar>
RawOrbit<Scalar> integrate_raw(const ProfileStateT<Scalar>& initial, const Params& params,
                               const IntegratorConfig& cfg) {
  using std::abs;
  using std::max;
  using std::min;
  using std::pow;
  using std::sqrt;

  const Scalar half_pi = std::numbers::pi_v<Scalar> / 2;
  const Scalar rtol(cfg.rel_tol);
  const Scalar atol(cfg.abs_tol);
  const Scalar x_max(cfg.x_max);
  const Scalar event_tol(cfg.event_tol);
  const Scalar eps(cfg.convergence_eps);
  const bool adaptive = cfg.fixed_step <= 0.0;

  RawOrbit<Scalar> out;
  Scalar x = initial.x;
  Phase<Scalar> y = initial.phase();
  out.states.push_back(initial);

  Phase<Scalar> k1;
  try {
    k1 = el_rhs<Scalar>(x, y, params);
  } catch (const NumericError&) {
    throw NumericError(ErrorKind::DegeneratePoint, "initial state is a fixed point");
  }

  const auto scale = [&](const Phase<Scalar>& a, const Phase<Scalar>& b) {
    Phase<Scalar> s;
    for (int i = 0; i < 2; ++i) s(i) = atol + rtol * max(abs(a(i)), abs(b(i)));
    return s;
  };

  Scalar h;
  if (adaptive) {
    // Hairer's starting step heuristic.
    const Phase<Scalar> sc = scale(y, y);
    const Scalar d0 = y.cwiseQuotient(sc).norm() / sqrt(Scalar(2));
    const Scalar d1 = k1.cwiseQuotient(sc).norm() / sqrt(Scalar(2));
    h = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1;
    h = min(h, Scalar(0.1));
  } else {
    h = Scalar(cfg.fixed_step);
  }

  constexpr double kSafety = 0.9;
  constexpr double kBeta = 0.04;
  const double expo = 0.2 - kBeta * 0.75;
  Scalar err_prev(1e-4);
  std::int64_t steps = 0;

  const auto finish = [&](Scalar xe, EventKind kind, int sign, std::string detail) {
    out.events.push_back({xe, kind, sign});
    out.detail = std::move(detail);
  };

  while (true) {
    if (x >= x_max) {
      finish(x, EventKind::Truncated, 0, "x_max reached");
      break;
    }
    if (steps >= cfg.max_steps) {
      finish(x, EventKind::Truncated, 0, "max_steps reached");
      break;
    }
    const Scalar step = min(h, x_max - x);

    StepResult<Scalar> res;
    try {
      res = dopri5_step<Scalar>(x, y, k1, step, params);
    } catch (const NumericError&) {
      // A stage hit the fixed point itself: the orbit has arrived.
      if (abs(abs(y(0)) - half_pi) < Scalar(1e-6)) {
        finish(x, EventKind::Converged, y(0) > 0 ? 1 : -1, "reached the degenerate fixed point");
        break;
      }
      if (adaptive && step > Scalar(1e-14)) {
        h = step / 4;
        continue;
      }
      throw;
    }
    ++steps;

    if (adaptive) {
      const Scalar err = res.err.cwiseQuotient(scale(y, res.y)).norm() / sqrt(Scalar(2));
      if (!(err <= 1)) {
        const Scalar fac = max(Scalar(0.2), Scalar(kSafety) * pow(err, Scalar(-expo)));
        h = step * min(Scalar(1), fac);
        if (h < Scalar(1e-14)) {
          finish(x, EventKind::Truncated, 0, "StepSizeUnderflow");
          break;
        }
        continue;
      }
      const Scalar e = max(err, Scalar(1e-10));
      Scalar fac = pow(e, Scalar(-expo)) * pow(err_prev, Scalar(kBeta)) * Scalar(kSafety);
      fac = min(Scalar(5), max(Scalar(0.2), fac));
      err_prev = max(err, Scalar(1e-4));
      h = step * fac;
    }

    const Scalar x1 = x + step;
    const Phase<Scalar>& y1 = res.y;

    // Exit through |h| = pi/2 truncates the step.
    Scalar limit = step;
    bool exit = false;
    int exit_sign = 0;
    if (abs(y1(0)) >= half_pi) {
      exit_sign = y1(0) > 0 ? 1 : -1;
      limit = locate<Scalar>(x, y, k1, step, params, event_tol, [&](const Phase<Scalar>& z) {
        return abs(z(0)) - half_pi;
      });
      exit = true;
    }
    const Phase<Scalar> y_end = exit ? step_to<Scalar>(x, y, k1, limit, params) : y1;

    std::vector<RawEvent<Scalar>> found;
    if (crosses<Scalar>(y(0), y_end(0))) {
      const Scalar tau = locate<Scalar>(x, y, k1, limit, params, event_tol,
                                        [](const Phase<Scalar>& z) { return z(0); });
      found.push_back({x + tau, EventKind::ZeroOfH, 0});
    }
    if (crosses<Scalar>(y(1), y_end(1))) {
      const Scalar tau = locate<Scalar>(x, y, k1, limit, params, event_tol,
                                        [](const Phase<Scalar>& z) { return z(1); });
      found.push_back({x + tau, EventKind::ZeroOfDh, 0});
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
    out.events.insert(out.events.end(), found.begin(), found.end());

    if (exit) {
      const Scalar xe = x + limit;
      if (xe > x) out.states.push_back({xe, y_end(0), y_end(1)});
      finish(xe, EventKind::ExitGamma, exit_sign, "");
      break;
    }

    x = x1;
    y = y1;
    k1 = res.k_end;
    out.states.push_back({x, y(0), y(1)});

    if (eps > 0 && settled<Scalar>(y, params.m, eps)) {
      finish(x, EventKind::Converged, y(0) > 0 ? 1 : -1, "");
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Integrates the reduced equation forward from x = 0.
///
/// Embedded Dormand-Prince 5(4) with PI step control (or a fixed step). Zeros of h and h'
/// and the exit through |h| = pi/2 are located by bisection on the accepted step. The run
/// ends at the first of: exit, convergence to (+-pi/2, 0), x_max, max_steps.
Orbit integrate_orbit(const ProfileState& initial, const Params& params, const IntegratorConfig& config);

/// Converts a raw run into an Orbit (samples with A, W, theta, rho; tail when converged).
Orbit assemble_orbit(const detail::RawOrbit<double>& raw, const Params& params);
Orbit assemble_orbit(const detail::RawOrbit<long double>& raw, const Params& params);

/// Max residual of the reduced equation between samples, from a quintic Hermite spline
/// through (h, h', h'') at the samples.
double energy_error_estimate(const Orbit& orbit, const Params& params);

/// Profile state at any x in [0, x_end] (one Dormand-Prince step from the preceding sample),
/// continued along the stable tail beyond x_end when the orbit converged.
ProfileState evaluate(const Orbit& orbit, double x);

}  // namespace pharm
