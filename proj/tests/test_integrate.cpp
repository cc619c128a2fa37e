#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pharm/integrate.hpp"

using namespace pharm;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<Params> kWindow = {{2, 3}, {2, 6}, {3, 5}, {4, 8}};
const std::vector<Params> kGrid = {{2, 3}, {2, 6}, {3, 5}, {4, 8}, {4, 3}, {5, 3}, {7, 5}, {3, 3}, {3, 12}, {2, 7}};

std::vector<double> xs_of(const Orbit& orbit, EventKind kind) {
  std::vector<double> out;
  for (const auto& e : orbit.events) {
    if (e.kind == kind) out.push_back(e.x);
  }
  return out;
}

void expect_rolle(const Orbit& orbit) {
  const auto zeros = xs_of(orbit, EventKind::ZeroOfH);
  const auto crit = xs_of(orbit, EventKind::ZeroOfDh);
  for (std::size_t i = 1; i < zeros.size(); ++i) {
    const bool between = std::any_of(crit.begin(), crit.end(), [&](double x) { return x > zeros[i - 1] && x < zeros[i]; });
    EXPECT_TRUE(between) << "no critical point between zeros at " << zeros[i - 1] << " and " << zeros[i];
  }
}

}  // namespace

TEST(Integrate, IdentityOrbitConverges) {
  const IntegratorConfig cfg;
  for (const auto& params : kWindow) {
    const Orbit orbit = integrate_orbit({0, 0, 1}, params, cfg);
    ASSERT_EQ(orbit.terminal().kind, EventKind::Converged) << orbit.terminal().detail;
    EXPECT_EQ(orbit.terminal().sign, 1);
    const ProfileState& end = orbit.samples.back().state;
    EXPECT_LT(std::hypot(end.h - kPi / 2, end.dh), cfg.convergence_eps);
    EXPECT_TRUE(orbit.tail.has_value());
    EXPECT_EQ(orbit.count(EventKind::ZeroOfH), 0);
    expect_rolle(orbit);
  }
}

TEST(Integrate, LargeSlopeExitsWithoutZeros) {
  for (const auto& params : kGrid) {
    if (params.m < params.p) continue;  // W then decreases; W(0) > 0 certifies nothing
    const double b = std::sqrt((params.m - 1) / (params.p - 1)) * 1.01;
    const Orbit orbit = integrate_orbit({0, 0, b}, params, IntegratorConfig{});
    EXPECT_EQ(orbit.terminal().kind, EventKind::ExitGamma);
    EXPECT_EQ(orbit.terminal().sign, 1);
    EXPECT_EQ(orbit.count(EventKind::ZeroOfH), 0);
    EXPECT_NEAR(orbit.samples.back().state.h, kPi / 2, 1e-9);
  }
}

TEST(Integrate, SmallSlopeWinds) {
  const Orbit orbit = integrate_orbit({0, 0, 1e-6}, {3, 5}, IntegratorConfig{});
  EXPECT_GE(orbit.count(EventKind::ZeroOfH), 3);
  expect_rolle(orbit);
}

TEST(Integrate, EventsSitOnSignChanges) {
  IntegratorConfig cfg;
  const Orbit orbit = integrate_orbit({0, 0, 1e-3}, {2, 3}, cfg);
  for (const auto& e : orbit.events) {
    if (e.kind == EventKind::ZeroOfH) {
      const ProfileState s = evaluate(orbit, e.x);
      EXPECT_LE(std::abs(s.h), 2 * cfg.event_tol * std::abs(s.dh) + 1e-15);
    }
    if (e.kind == EventKind::ZeroOfDh) {
      const ProfileState s = evaluate(orbit, e.x);
      const double ddh = el_rhs(s, orbit.params)(1);
      EXPECT_LE(std::abs(s.dh), 2 * cfg.event_tol * std::abs(ddh) + 1e-15);
    }
  }
}

TEST(Integrate, ErrorEstimate) {
  for (const auto& params : kWindow) {
    const Orbit orbit = integrate_orbit({0, 0, 1}, params, IntegratorConfig{});
    EXPECT_LT(energy_error_estimate(orbit, params), 1e-8);
  }
  IntegratorConfig tiny;
  tiny.max_steps = 5;
  const Orbit cut = integrate_orbit({0, 0, 0.3}, {2, 3}, tiny);
  EXPECT_EQ(cut.terminal().kind, EventKind::Truncated);
  EXPECT_TRUE(std::isfinite(energy_error_estimate(cut, {2, 3})));

  IntegratorConfig loose;
  loose.rel_tol = 1e-6;
  loose.abs_tol = 1e-8;
  for (const auto& params : kWindow) {
    const Orbit a = integrate_orbit({0, 0, 0.4}, params, loose);
    const Orbit b = integrate_orbit({0, 0, 0.4}, params, IntegratorConfig{});
    EXPECT_LT(energy_error_estimate(b, params), energy_error_estimate(a, params));
  }
}

TEST(Integrate, ToleranceRefinement) {
  IntegratorConfig base;
  base.convergence_eps = 0.0;
  base.x_max = 5.0;
  IntegratorConfig fine = base;
  fine.rel_tol = base.rel_tol / 2;
  int checked = 0;
  for (const auto& params : {Params{2, 3}, Params{3, 5}}) {
    for (double b : {0.05, 0.1, 0.15, 0.2, 0.3}) {
      const Orbit a = integrate_orbit({0, 0, b}, params, base);
      const Orbit c = integrate_orbit({0, 0, b}, params, fine);
      const ProfileState ea = evaluate(a, 5.0);
      const ProfileState ec = evaluate(c, 5.0);
      const double local = base.rel_tol * std::max(std::abs(ea.h), std::abs(ea.dh)) + base.abs_tol;
      EXPECT_LT(std::abs(ea.h - ec.h), 10 * local) << params.p << " " << params.m << " " << b;
      EXPECT_LT(std::abs(ea.dh - ec.dh), 10 * local) << params.p << " " << params.m << " " << b;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 10);
}

TEST(Integrate, GronwallBound) {
  IntegratorConfig cfg;
  cfg.x_max = 3.0;
  cfg.convergence_eps = 0.0;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.07, 0.07);
  double worst = 0.0;
  for (const auto& params : kGrid) {
    for (int i = 0; i < 10; ++i) {
      const ProfileState init{0.0, u(rng), u(rng)};
      const double rho0 = std::hypot(init.h, init.dh);
      if (rho0 == 0.0 || rho0 >= 0.1) continue;
      const Orbit orbit = integrate_orbit(init, params, cfg);
      for (const auto& s : orbit.samples) {
        if (s.state.x > 1e-3) worst = std::max(worst, std::log(s.rho / rho0) / s.state.x);
      }
    }
  }
  EXPECT_LT(worst, 20.0);
}

TEST(Integrate, LyapunovNondecreasingAboveP) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> bs(1e-3, 2.5);
  IntegratorConfig cfg;
  for (const auto& params : kGrid) {
    if (params.m <= params.p) continue;
    for (int i = 0; i < 10; ++i) {
      const Orbit orbit = integrate_orbit({0, 0, bs(rng)}, params, cfg);
      for (std::size_t j = 1; j < orbit.samples.size(); ++j) {
        EXPECT_GE(orbit.samples[j].w_val - orbit.samples[j - 1].w_val, -1e-8);
      }
      expect_rolle(orbit);
    }
  }
}

TEST(Integrate, Deterministic) {
  const Orbit a = integrate_orbit({0, 0, 0.37}, {3, 5}, IntegratorConfig{});
  const Orbit b = integrate_orbit({0, 0, 0.37}, {3, 5}, IntegratorConfig{});
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].state.x, b.samples[i].state.x);
    EXPECT_EQ(a.samples[i].state.h, b.samples[i].state.h);
    EXPECT_EQ(a.samples[i].state.dh, b.samples[i].state.dh);
  }
}

TEST(Integrate, ExtendedPrecisionAgrees) {
  IntegratorConfig ext;
  ext.precision = Precision::Extended;
  const Orbit a = integrate_orbit({0, 0, 0.2}, {2, 3}, IntegratorConfig{});
  const Orbit b = integrate_orbit({0, 0, 0.2}, {2, 3}, ext);
  EXPECT_EQ(a.count(EventKind::ZeroOfH), b.count(EventKind::ZeroOfH));
  EXPECT_EQ(a.terminal().kind, b.terminal().kind);
  EXPECT_NEAR(a.terminal().x, b.terminal().x, 1e-6);
}

TEST(Integrate, SamplesIncreaseAndCarryDerivedData) {
  const Params params{4, 8};
  const Orbit orbit = integrate_orbit({0, 0, 0.6}, params, IntegratorConfig{});
  EXPECT_EQ(orbit.samples.front().state.x, 0.0);
  EXPECT_NEAR(orbit.samples.front().theta, kPi / 2, 1e-15);
  for (std::size_t i = 1; i < orbit.samples.size(); ++i) {
    const auto& s = orbit.samples[i];
    EXPECT_GT(s.state.x, orbit.samples[i - 1].state.x);
    EXPECT_NEAR(s.a_val, a_value(s.state, params), 1e-14 * std::max(1.0, s.a_val));
    EXPECT_NEAR(s.rho, std::hypot(s.state.h, s.state.dh), 1e-14);
    EXPECT_LT(std::abs(s.theta - orbit.samples[i - 1].theta), kPi);
  }
}

TEST(Integrate, RejectsBadInput) {
  IntegratorConfig bad;
  bad.rel_tol = 0.0;
  EXPECT_THROW(integrate_orbit({0, 0, 1}, {2, 3}, bad), std::invalid_argument);
  IntegratorConfig short_x;
  short_x.x_max = 0.5;
  EXPECT_THROW(integrate_orbit({0, 0, 1}, {2, 3}, short_x), std::invalid_argument);
  EXPECT_THROW(integrate_orbit({1.0, 0, 1}, {2, 3}, IntegratorConfig{}), std::invalid_argument);
  try {
    integrate_orbit({0, kPi / 2, 0}, {2, 3}, IntegratorConfig{});
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegeneratePoint);
  }
}

TEST(Integrate, EvaluateMatchesSamples) {
  const Orbit orbit = integrate_orbit({0, 0, 1}, {2, 3}, IntegratorConfig{});
  for (const auto& s : orbit.samples) {
    const ProfileState e = evaluate(orbit, s.state.x);
    EXPECT_EQ(e.h, s.state.h);
  }
  for (double x = 0.0; x < 4.0; x += 0.173) EXPECT_NEAR(evaluate(orbit, x).h, identity_profile(x).h, 1e-8);
}
