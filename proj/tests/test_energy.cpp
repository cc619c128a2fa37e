#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "pharm/energy.hpp"
#include "pharm/shooting.hpp"
#include "pharm/spectrum.hpp"

using namespace pharm;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<Params> kGrid = {{2, 3}, {2, 6}, {3, 5}, {4, 8}, {4, 3}, {5, 3}, {7, 5}, {3, 3}, {3, 12}, {2, 7}};

RProfile sampled_r(const std::function<double(double)>& r, const std::function<double(double)>& dr,
                   const std::function<double(double)>& ddr, int n = 2000) {
  RProfile out;
  for (int i = 0; i <= n; ++i) {
    const double t = kPi * i / n;
    out.samples.push_back({t, r(t), dr(t), ddr(t)});
  }
  out.k_end = static_cast<int>(std::lround(out.samples.back().r / kPi));
  return out;
}

RProfile identity_r() {
  return sampled_r([](double t) { return t; }, [](double) { return 1.0; }, [](double) { return 0.0; });
}

double weighted_norm(const std::vector<double>& xi, const UniformGrid& grid, int m) {
  Eigen::VectorXd f(grid.n);
  for (int i = 0; i < grid.n; ++i) f(i) = xi[i] * xi[i] * std::pow(1.0 / std::cosh(grid.x(i)), m);
  return simpson(f, grid.dx);
}

}  // namespace

TEST(Energy, ClosedForm) {
  EXPECT_NEAR(identity_energy_closed({2, 3}), 3 * kPi / 4, 1e-14);
  EXPECT_NEAR(identity_energy_closed({2, 2}), 2.0, 1e-14);
  // (p, m) = (4, 5): 25/4 * int sech^5 = 25/4 * 3 pi / 8.
  EXPECT_NEAR(identity_energy_closed({4, 5}), 25.0 / 4.0 * 3.0 * kPi / 8.0, 1e-12);
}

TEST(Energy, IdentityInBothCharts) {
  const HalfProfile id = HalfProfile::identity();
  const RProfile r = identity_r();
  for (const auto& params : kGrid) {
    if (!(params.m > params.p)) continue;
    const double closed = identity_energy_closed(params);
    EXPECT_NEAR(energy_x(id, params), closed, 1e-8) << params.p << "," << params.m;
    EXPECT_NEAR(energy_t(r, params), closed, 1e-8) << params.p << "," << params.m;
  }
  EXPECT_NEAR(energy_t(r, {2, 2}), 2.0, 1e-8);
  EXPECT_NEAR(energy_x(id, {4, 5}), identity_energy_closed({4, 5}), 1e-8);
}

TEST(Energy, TrivialProfiles) {
  EXPECT_NEAR(energy_x(HalfProfile::constant(kPi / 2), {2, 3}), 0.0, 1e-30);
  const RProfile zero = sampled_r([](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; });
  EXPECT_EQ(energy_t(zero, {3, 5}), 0.0);
}

TEST(Energy, Errors) {
  try {
    energy_x(HalfProfile::constant(0.3), {2, 3});
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TailNotConverged);
  }
  const RProfile shifted =
      sampled_r([](double t) { return t + 0.5; }, [](double) { return 1.0; }, [](double) { return 0.0; });
  try {
    energy_t(shifted, {2, 3});
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PoleSingularity);
  }
}

TEST(Energy, ChartsAgreeOnSolutions) {
  for (const auto& params : {Params{2, 3}, Params{3, 5}}) {
    for (int k = 1; k <= 3; ++k) {
      const ShootResult r = find_bk(params, k, 1e-9, IntegratorConfig{});
      const double ex = energy_x(HalfProfile::from_orbit(r.orbit, Symmetry::Odd), params);
      const double et = energy_t(r.solution, params);
      EXPECT_NEAR(ex, et, 1e-7) << params.p << "," << params.m << " k=" << k;
      EXPECT_NEAR(r.energy, ex, 1e-12);
    }
  }
}

TEST(SecondVariation, ZeroDirection) {
  const UniformGrid grid = default_spectral_grid();
  const std::vector<double> zero(grid.n, 0.0);
  EXPECT_EQ(second_variation(HalfProfile::identity(), zero, grid, {3, 5}), 0.0);
}

TEST(SecondVariation, RayleighIdentity) {
  const UniformGrid grid = default_spectral_grid();
  const HalfProfile id = HalfProfile::identity();
  for (const auto& params : kGrid) {
    const SpectrumReport spec = spectrum_report(params, 4, false, grid);
    for (const auto& e : spec.pairs) {
      const auto xi = eigenfunction_samples(e.j, static_cast<int>(params.m), grid);
      const double q = second_variation(id, xi, grid, params);
      const double expected = e.lambda_unscaled * weighted_norm(xi, grid, static_cast<int>(params.m));
      const double scale = std::max(std::abs(expected), 1e-12);
      if (e.lambda_hat_selected == 0.0) {
        EXPECT_NEAR(q, 0.0, 1e-6);
      } else {
        EXPECT_LT(std::abs(q - expected) / scale, 1e-5) << params.p << "," << params.m << " j=" << e.j;
      }
    }
  }
}

TEST(SecondVariation, Symmetry) {
  const UniformGrid grid = default_spectral_grid();
  const HalfProfile id = HalfProfile::identity();
  for (const auto& params : {Params{2, 3}, Params{3, 5}, Params{5, 3}}) {
    const auto a = sample(grid, [](double x) { return std::exp(-x * x) * (1 + x); });
    const auto b = sample(grid, [](double x) { return std::exp(-0.5 * (x - 1) * (x - 1)); });
    const double ab = second_variation_bilinear(id, a, b, grid, params);
    const double ba = second_variation_bilinear(id, b, a, grid, params);
    EXPECT_NEAR(ab, ba, 1e-6 * std::max(1.0, std::abs(ab)));
  }
}

TEST(SecondVariation, SignTest) {
  const UniformGrid grid = default_spectral_grid();
  const HalfProfile id = HalfProfile::identity();
  std::mt19937_64 rng(20261019);
  std::uniform_real_distribution<double> centre(-4.0, 4.0);
  std::uniform_real_distribution<double> width(1.0, 4.0);
  for (const auto& params : {Params{4, 3}, Params{5, 3}, Params{7, 5}}) {
    for (int n = 0; n < 10; ++n) {
      const double c = centre(rng);
      const double w = width(rng);
      const auto bump = sample(grid, [&](double x) {
        const double u = (x - c) / w;
        return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
      });
      EXPECT_GT(second_variation(id, bump, grid, params), 0.0) << params.p << "," << params.m;
    }
  }
  for (const auto& params : {Params{2, 3}, Params{2, 6}, Params{3, 5}}) {
    const auto xi = eigenfunction_samples(1, static_cast<int>(params.m), grid);
    EXPECT_LT(second_variation(id, xi, grid, params), 0.0);
  }
  const auto xi = eigenfunction_samples(1, 3, grid);
  EXPECT_GT(second_variation(id, xi, grid, {5, 3}), 0.0);
}

TEST(SecondVariation, RejectsNonCriticalProfiles) {
  const UniformGrid grid = default_spectral_grid();
  HalfProfile bent = HalfProfile::identity();
  bent.eval = [](double x) {
    const ProfileState s = identity_profile(x);
    return ProfileState{x, s.h * 0.9, s.dh * 0.9};
  };
  const auto xi = eigenfunction_samples(1, 3, grid);
  try {
    second_variation(bent, xi, grid, {2, 3});
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonCriticalProfile);
  }
  EXPECT_LT(profile_residual(HalfProfile::identity(), grid, {2, 3}), 1e-6);
}
