#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "pharm/model.hpp"

using namespace pharm;

namespace {

void expect_rejects(double p, double m, const std::string& needle) {
  try {
    validate_params(p, m);
    FAIL() << "accepted (" << p << ", " << m << ")";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Model, ValidateAcceptsAdmissiblePairs) {
  const Params a = validate_params(2, 3);
  EXPECT_EQ(a.p, 2.0);
  EXPECT_EQ(a.m, 3);
  const Params b = validate_params(3, 5);
  EXPECT_EQ(b.p, 3.0);
  EXPECT_EQ(b.m, 5);
  EXPECT_EQ(validate_params(2.5, 7.0).m, 7);
}

TEST(Model, ValidateNamesTheOffendingField) {
  expect_rejects(1.5, 3, "p must be ≥ 2");
  expect_rejects(2, 1, "m must be ≥ 2");
  expect_rejects(std::numeric_limits<double>::infinity(), 3, "p");
  expect_rejects(2, std::numeric_limits<double>::quiet_NaN(), "m");
  expect_rejects(2, 3.5, "m must be an integer");
}

TEST(Model, RegimeExamples) {
  const RegimeReport r23 = regime({2, 3});
  EXPECT_DOUBLE_EQ(r23.discriminant, -7.0);
  EXPECT_EQ(r23.regime, Regime::Oscillatory);

  const RegimeReport r27 = regime({2, 7});
  EXPECT_NEAR(r27.existence_upper, 4 + 2 * std::sqrt(2.0), 1e-12);
  EXPECT_LT(r27.existence_upper, 7.0);
  EXPECT_EQ(r27.regime, Regime::Exponential);
  EXPECT_EQ(r27.alpha_plus.imag(), 0.0);

  const RegimeReport r35 = regime({3, 5});
  EXPECT_NEAR(r35.winding_upper, 7 + 2 * std::sqrt(6.0), 1e-12);
  EXPECT_NEAR(r35.existence_upper, 5 + 2 * std::sqrt(3.0), 1e-12);
  EXPECT_EQ(r35.regime, Regime::Oscillatory);
  EXPECT_EQ(r35.existence_lower, 3.0);
}

TEST(Model, BoundaryCases) {
  EXPECT_EQ(regime({3, 3}).regime, Regime::Boundary);
  EXPECT_EQ(regime({4, 10}).regime, Regime::Boundary);  // 2 + 4 + 2 sqrt(4) = 10
  EXPECT_EQ(regime({9, 17}).regime, Regime::Boundary);
}

TEST(Model, WindowExamples) {
  EXPECT_TRUE(in_existence_window({2, 6}));
  EXPECT_FALSE(in_existence_window({2, 7}));
  EXPECT_TRUE(in_existence_window({4, 8}));
  EXPECT_FALSE(in_existence_window({3, 3}));
  EXPECT_FALSE(in_existence_window({5, 3}));
}

TEST(Model, VietaAndCharacteristicResidual) {
  for (int pi = 2; pi <= 10; ++pi) {
    for (int m = 2; m <= 40; ++m) {
      const double p = pi + 0.25 * (m % 3);
      const RegimeReport r = regime({p, m});
      const auto sum = r.alpha_plus + r.alpha_minus;
      const auto prod = r.alpha_plus * r.alpha_minus;
      EXPECT_NEAR(sum.real(), m - p, 1e-12);
      EXPECT_NEAR(sum.imag(), 0.0, 1e-12);
      EXPECT_NEAR(prod.real(), m - 1.0, 1e-12 * m);
      EXPECT_NEAR(prod.imag(), 0.0, 1e-12 * m);
      for (auto a : {r.alpha_plus, r.alpha_minus}) {
        EXPECT_LT(std::abs(a * a - (m - p) * a + (m - 1.0)), 1e-10 * m * m);
      }
    }
  }
}

TEST(Model, OscillatoryIffInWindowAboveP) {
  for (int p = 2; p <= 10; ++p) {
    for (int m = 3; m <= 40; ++m) {
      if (m <= p) continue;
      const Params params{static_cast<double>(p), m};
      EXPECT_EQ(regime(params).regime == Regime::Oscillatory, in_existence_window(params))
          << "p=" << p << " m=" << m;
    }
  }
}

TEST(Model, WindowsCoincideOnlyAtPEqualsTwo) {
  EXPECT_LT(std::abs(existence_upper(2) - winding_upper(2)), 1e-12);
  for (double p = 2.1; p <= 12.0; p += 0.37) EXPECT_LT(existence_upper(p), winding_upper(p)) << p;
}

TEST(Model, RegimeIsAPureFunction) {
  const RegimeReport a = regime({3.5, 9});
  const RegimeReport b = regime({3.5, 9});
  EXPECT_EQ(a.discriminant, b.discriminant);
  EXPECT_EQ(a.regime, b.regime);
  EXPECT_EQ(a.alpha_plus, b.alpha_plus);
}
