#pragma once

#include <complex>
#include <string>

namespace pharm {

/// Exponent p and sphere dimension m of the rotationally symmetric problem.
struct Params {
  double p = 2.0;
  int m = 3;
};

enum class Regime { Oscillatory, Exponential, Boundary };

const char* to_string(Regime regime);

/// Closed-form regime analysis for a parameter pair.
///
/// The exponents are the roots of a^2 - (m-p) a + (m-1) = 0, the characteristic
/// equation of the linearization around h = 0 for large x. Complex roots give
/// oscillating small orbits (existence side), real roots give monotone growth.
struct RegimeReport {
  double existence_lower = 0.0;
  double existence_upper = 0.0;
  double winding_upper = 0.0;
  double discriminant = 0.0;
  std::complex<double> alpha_plus;
  std::complex<double> alpha_minus;
  Regime regime = Regime::Boundary;
};

/// Throws std::invalid_argument naming the offending field.
Params validate_params(double p, double m);

RegimeReport regime(const Params& params);

/// p < m < 2 + p + 2 sqrt(p)
bool in_existence_window(const Params& params);

/// p < m < 3p - 2 + 2 sqrt(p (p - 1)), the range where small orbits wind.
bool in_winding_window(const Params& params);

double existence_upper(double p);
double winding_upper(double p);

}  // namespace pharm
