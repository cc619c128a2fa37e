#include "pharm/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pharm/energy.hpp"
#include "pharm/numerics.hpp"

namespace pharm {

namespace {

constexpr double kPi = std::numbers::pi;
using LD = long double;

constexpr double kScanFloor = 1e-12;
constexpr double kRefineStep = 1.0 / 256;
constexpr int kMaxRetries = 4;

IntegratorConfig discriminator(IntegratorConfig cfg) {
  cfg.convergence_eps = 0.0;
  cfg.precision = Precision::Double;
  cfg.fixed_step = 0.0;
  return cfg;
}

IntegratorConfig refinement(IntegratorConfig cfg) {
  cfg.convergence_eps = 0.0;
  cfg.precision = Precision::Extended;
  cfg.fixed_step = kRefineStep;
  cfg.event_tol = 1e-6;
  return cfg;
}

template <typename Scalar>
int zeros_of(const detail::RawOrbit<Scalar>& raw) {
  return static_cast<int>(std::count_if(raw.events.begin(), raw.events.end(),
                                        [](const auto& e) { return e.kind == EventKind::ZeroOfH; }));
}

int zero_count_double(double b, const Params& params, const IntegratorConfig& cfg) {
  return zeros_of(detail::integrate_raw<double>({0.0, 0.0, b}, params, cfg));
}

int zero_count_extended(LD b, const Params& params, const IntegratorConfig& cfg) {
  return zeros_of(detail::integrate_raw<LD>({0.0L, 0.0L, b}, params, cfg));
}

// First accepted state of `lo` after k-1 zeros where the two bracket orbits have separated by
// more than a^5 (a = stable amplitude): beyond it the shooting error dominates the tail model.
std::optional<std::size_t> truncation_index(const detail::RawOrbit<LD>& lo, const detail::RawOrbit<LD>& hi,
                                            int k, int m, double ball) {
  const std::size_t n = std::min(lo.states.size(), hi.states.size());
  std::size_t ev = 0;
  int zeros = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const auto& a = lo.states[i];
    const auto& b = hi.states[i];
    if (std::abs(static_cast<double>(a.x - b.x)) > 1e-12) break;
    while (ev < lo.events.size() && lo.events[ev].x <= a.x) {
      if (lo.events[ev].kind == EventKind::ZeroOfH) ++zeros;
      ++ev;
    }
    if (zeros > k - 1) break;
    if (zeros < k - 1) continue;
    const double h = static_cast<double>(a.h);
    const int sign = h > 0 ? 1 : -1;
    const double u = static_cast<double>(a.h - sign * std::numbers::pi_v<LD> / 2);
    const double du = static_cast<double>(a.dh);
    if (!(std::hypot(u, du) < ball) || !(u * du < 0)) continue;
    double stable = 0.0;
    double unstable = 0.0;
    StableTail::split(u, du, m, stable, unstable);
    const double noise = static_cast<double>(std::abs(a.h - b.h) + std::abs(a.dh - b.dh));
    const double a5 = std::pow(std::abs(stable), 5);
    if (noise >= a5 || std::abs(unstable) > std::abs(stable) / 2) return i;
  }
  return std::nullopt;
}

// Fallback when the bracket orbits coincide: the single-orbit settle test.
std::optional<std::size_t> settle_index(const detail::RawOrbit<LD>& raw, int k, int m, double ball) {
  std::size_t ev = 0;
  int zeros = 0;
  for (std::size_t i = 1; i < raw.states.size(); ++i) {
    const auto& s = raw.states[i];
    while (ev < raw.events.size() && raw.events[ev].x <= s.x) {
      if (raw.events[ev].kind == EventKind::ZeroOfH) ++zeros;
      ++ev;
    }
    if (zeros > k - 1) break;
    if (zeros == k - 1 && detail::settled<LD>(s.phase(), m, static_cast<LD>(ball))) return i;
  }
  return std::nullopt;
}

detail::RawOrbit<LD> truncate(const detail::RawOrbit<LD>& raw, std::size_t index) {
  detail::RawOrbit<LD> out;
  out.states.assign(raw.states.begin(), raw.states.begin() + static_cast<std::ptrdiff_t>(index) + 1);
  const LD x_end = out.states.back().x;
  for (const auto& e : raw.events) {
    if (e.x <= x_end && e.kind != EventKind::ExitGamma && e.kind != EventKind::Truncated) out.events.push_back(e);
  }
  out.events.push_back({x_end, EventKind::Converged, out.states.back().h > 0 ? 1 : -1});
  out.detail = "connecting orbit truncated where the bracket orbits separate";
  return out;
}

}  // namespace

const char* to_string(Classification c) {
  switch (c) {
    case Classification::ExitPlus: return "ExitPlus";
    case Classification::ExitMinus: return "ExitMinus";
    case Classification::ConvergedPlus: return "ConvergedPlus";
    case Classification::ConvergedMinus: return "ConvergedMinus";
    case Classification::Undecided: return "Undecided";
  }
  return "Unknown";
}

void ShootSpec::validate() const {
  if (!(value > 0.0) || !std::isfinite(value)) throw std::invalid_argument("shoot value must be positive");
  if (kind == OrbitKind::DOrbit && !(value < kPi / 2)) throw std::invalid_argument("d must be below pi/2");
}

ProfileState ShootSpec::initial() const {
  if (kind == OrbitKind::BOrbit) return {0.0, 0.0, value};
  return {0.0, value, 0.0};
}

OrbitOutcome classify(const Orbit& orbit) {
  OrbitOutcome out;
  if (orbit.samples.empty() || orbit.events.empty()) {
    out.diagnostic = "empty orbit";
    return out;
  }
  const OrbitEvent& end = orbit.terminal();
  out.x_e = end.x;
  out.zero_count = orbit.count(EventKind::ZeroOfH);
  double theta_end = orbit.samples.back().theta;
  switch (end.kind) {
    case EventKind::ExitGamma:
      out.classification = end.sign > 0 ? Classification::ExitPlus : Classification::ExitMinus;
      break;
    case EventKind::Converged:
      out.classification = end.sign > 0 ? Classification::ConvergedPlus : Classification::ConvergedMinus;
      theta_end = unwrap_angle(theta_end, end.sign * kPi / 2, 0.0);
      break;
    default:
      out.classification = Classification::Undecided;
      break;
  }
  out.omega = -(theta_end - orbit.samples.front().theta) / kPi;
  out.diagnostic = end.detail;
  return out;
}

OrbitRun run_orbit(const ShootSpec& spec, const Params& params, const IntegratorConfig& config) {
  spec.validate();
  OrbitRun run;
  try {
    run.orbit = integrate_orbit(spec.initial(), params, config);
    run.outcome = classify(run.orbit);
  } catch (const NumericError& e) {
    run.outcome.classification = Classification::Undecided;
    run.outcome.diagnostic = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return run;
}

double upper_bracket(const Params& params) {
  return std::sqrt((params.m - 1) / (params.p - 1)) * (1.0 + 1e-6);
}

std::vector<int> scan_zero_counts(const Params& params, const std::vector<double>& bs,
                                  const IntegratorConfig& config, int jobs) {
  const IntegratorConfig cfg = discriminator(config);
  std::vector<int> out(bs.size(), -1);
  parallel_for(bs.size(), jobs, [&](std::size_t i) {
    try {
      out[i] = zero_count_double(bs[i], params, cfg);
    } catch (const NumericError&) {
      out[i] = -1;
    }
  });
  return out;
}

ShootResult find_bk(const Params& params, int k, double b_tol, const IntegratorConfig& config) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (!(b_tol > 0.0)) throw std::invalid_argument("b_tol must be positive");
  config.validate();

  ShootResult result;
  result.params = params;
  result.k = k;
  if (!in_existence_window(params)) result.warnings.push_back("(p, m) lies outside the existence window");
  if (regime(params).regime == Regime::Boundary) result.warnings.push_back("(p, m) is a boundary case");

  // Stage 1: adaptive double-precision bisection on the zero count.
  const IntegratorConfig disc = discriminator(config);
  const auto count = [&](double b) { return zero_count_double(b, params, disc); };
  double hi = upper_bracket(params);
  double lo = hi;
  if (count(hi) >= k) {
    throw NumericError(ErrorKind::BracketNotFound, "upper bracket already has k zeros");
  }
  while (true) {
    lo = 0.5 * hi;
    if (lo < kScanFloor) {
      throw NumericError(ErrorKind::BracketNotFound,
                         "no b-orbit with " + std::to_string(k) + " zeros above the scan floor");
    }
    if (count(lo) >= k) break;
    hi = lo;
  }
  while (hi - lo > b_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (count(mid) >= k ? lo : hi) = mid;
  }
  result.bracket_width = hi - lo;
  result.b_adaptive = 0.5 * (lo + hi);

  // Stage 2: extended precision on a fixed-step flow, bisected to the last bit.
  IntegratorConfig ext = refinement(config);
  const auto count_ext = [&](LD b) { return zero_count_extended(b, params, ext); };
  LD elo = lo;
  LD ehi = hi;
  bool bracketed = count_ext(elo) >= k && count_ext(ehi) < k;
  LD widen = std::max<LD>(ehi - elo, 1e-12L);
  for (int i = 0; i < 20 && !bracketed; ++i, widen *= 2) {
    elo = std::max<LD>(static_cast<LD>(lo) - widen, static_cast<LD>(lo) / 2);
    ehi = static_cast<LD>(hi) + widen;
    bracketed = count_ext(elo) >= k && count_ext(ehi) < k;
  }
  if (!bracketed) {
    throw NumericError(ErrorKind::NonConvergent, "extended-precision refinement lost the bracket");
  }
  for (int i = 0; i < 200; ++i) {
    const LD mid = elo + (ehi - elo) / 2;
    if (mid <= elo || mid >= ehi) break;
    (count_ext(mid) >= k ? elo : ehi) = mid;
  }
  result.b_k = static_cast<double>(elo + (ehi - elo) / 2);

  // Reconstruction: the connecting orbit is followed while the bracket orbits agree.
  const double ball = config.convergence_eps > 0.0 ? config.convergence_eps : 0.2;
  std::optional<detail::RawOrbit<LD>> converged;
  for (int attempt = 0; attempt <= kMaxRetries && !converged; ++attempt) {
    const auto raw_lo = detail::integrate_raw<LD>({0.0L, 0.0L, elo}, params, ext);
    const auto raw_hi = detail::integrate_raw<LD>({0.0L, 0.0L, ehi}, params, ext);
    auto index = truncation_index(raw_lo, raw_hi, k, params.m, ball);
    if (!index) index = settle_index(raw_lo, k, params.m, ball);
    if (index) {
      converged = truncate(raw_lo, *index);
      break;
    }
    const bool truncated = raw_lo.events.back().kind == EventKind::Truncated ||
                           raw_hi.events.back().kind == EventKind::Truncated;
    if (!truncated) break;
    ext.x_max *= 2;
  }
  if (!converged) {
    throw NumericError(ErrorKind::NonConvergent,
                       "connecting orbit not resolved; bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }

  result.orbit = assemble_orbit(*converged, params);
  result.outcome = classify(result.orbit);
  const Classification expected = k % 2 == 1 ? Classification::ConvergedPlus : Classification::ConvergedMinus;
  if (result.outcome.classification != expected || result.outcome.zero_count != k - 1) {
    throw NumericError(ErrorKind::NonConvergent, "reconstructed orbit does not match the k-th connecting orbit");
  }
  result.solution = to_r_profile(result.orbit, Symmetry::Odd, params);
  result.energy = energy_x(HalfProfile::from_orbit(result.orbit, Symmetry::Odd), params);
  return result;
}

std::vector<CatalogueEntry> solve_catalogue(const Params& params, int k_max, double b_tol,
                                            const IntegratorConfig& config, int jobs) {
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  std::vector<CatalogueEntry> out(static_cast<std::size_t>(k_max));
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    CatalogueEntry& entry = out[i];
    entry.k = static_cast<int>(i) + 1;
    try {
      entry.result = find_bk(params, entry.k, b_tol, config);
    } catch (const NumericError& e) {
      entry.error = e.kind();
      entry.message = e.what();
    }
  });
  return out;
}

}  // namespace pharm
