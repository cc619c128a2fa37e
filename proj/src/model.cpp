#include "pharm/model.hpp"

#include <cmath>
#include <stdexcept>

#include "pharm/errors.hpp"

namespace pharm {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegeneratePoint: return "DegeneratePoint";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::BracketNotFound: return "BracketNotFound";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::TailNotConverged: return "TailNotConverged";
    case ErrorKind::PoleSingularity: return "PoleSingularity";
    case ErrorKind::NonCriticalProfile: return "NonCriticalProfile";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::EigenNotConverged: return "EigenNotConverged";
  }
  return "Unknown";
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Oscillatory: return "Oscillatory";
    case Regime::Exponential: return "Exponential";
    case Regime::Boundary: return "Boundary";
  }
  return "Unknown";
}

Params validate_params(double p, double m) {
  if (!std::isfinite(p)) throw std::invalid_argument("p must be finite");
  if (!std::isfinite(m)) throw std::invalid_argument("m must be finite");
  if (p < 2.0) throw std::invalid_argument("p must be ≥ 2");
  if (m < 2.0) throw std::invalid_argument("m must be ≥ 2");
  if (m != std::round(m)) throw std::invalid_argument("m must be an integer");
  if (m > 1e6) throw std::invalid_argument("m is out of range");
  return Params{p, static_cast<int>(std::lround(m))};
}

double existence_upper(double p) { return 2.0 + p + 2.0 * std::sqrt(p); }

double winding_upper(double p) {
  return 3.0 * p - 2.0 + 2.0 * std::sqrt(p * (p - 1.0));
}

RegimeReport regime(const Params& params) {
  const double p = params.p;
  const double m = params.m;

  RegimeReport r;
  r.existence_lower = p;
  r.existence_upper = existence_upper(p);
  r.winding_upper = winding_upper(p);
  r.discriminant = m * m - 2.0 * m * (2.0 + p) + p * p + 4.0;

  const std::complex<double> root = std::sqrt(std::complex<double>(r.discriminant, 0.0));
  r.alpha_plus = 0.5 * ((m - p) + root);
  r.alpha_minus = 0.5 * ((m - p) - root);

  constexpr double kEdge = 1e-12;
  const bool on_edge = m == p || std::abs(m - r.existence_upper) <= kEdge * r.existence_upper ||
                       r.discriminant == 0.0;
  if (on_edge) {
    r.regime = Regime::Boundary;
  } else {
    r.regime = r.discriminant < 0.0 ? Regime::Oscillatory : Regime::Exponential;
  }
  return r;
}

bool in_existence_window(const Params& params) {
  return params.p < params.m && params.m < existence_upper(params.p);
}

bool in_winding_window(const Params& params) {
  return params.p < params.m && params.m < winding_upper(params.p);
}

}  // namespace pharm
