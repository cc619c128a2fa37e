#include "pharm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "pharm/errors.hpp"

namespace pharm {

double gegenbauer(int n, double alpha, double s) {
  if (n < 0) throw std::invalid_argument("gegenbauer: n must be non-negative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * alpha * s;
  for (int k = 2; k <= n; ++k) {
    const double next = (2.0 * (k + alpha - 1.0) * s * cur - (k + 2.0 * alpha - 2.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  return cur;
}

double eigenvalue_theorem(int j, const Params& params) {
  if (j < 1) throw std::invalid_argument("j must be at least 1");
  const double m = params.m;
  return -2.0 * m + params.p + j * (j + m - 1.0);
}

double eigenvalue_chain(int j, const Params& params) {
  if (j < 1) throw std::invalid_argument("j must be at least 1");
  const double m = params.m;
  const double p = params.p;
  return (m + p - 2.0) * (j - 1.0) * (j + m) / m + p - m;
}

double eigenfunction(int j, int m, double x) {
  if (j < 1) throw std::invalid_argument("j must be at least 1");
  return gegenbauer(j - 1, 0.5 * (m + 1), std::tanh(x)) / std::cosh(x);
}

std::vector<double> eigenfunction_samples(int j, int m, const UniformGrid& grid) {
  return sample(grid, [j, m](double x) { return eigenfunction(j, m, x); });
}

double jacobi_residual(std::span<const double> xi, double lambda_hat, const Params& params,
                       const UniformGrid& grid) {
  if (static_cast<int>(xi.size()) != grid.n) throw std::invalid_argument("jacobi_residual: size mismatch");
  if (grid.dx > 1e-2 + 1e-15 || grid.x0 > -20.0 + 1e-9 * 20.0 || grid.x_end() < 20.0 - 1e-9 * 20.0) {
    throw NumericError(ErrorKind::GridTooCoarse, "jacobi_residual: grid must cover [-20, 20] with dx <= 1e-2");
  }
  const double p = params.p;
  const double m = params.m;
  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(xi.data(), grid.n);
  const double scale = u.cwiseAbs().maxCoeff();
  if (scale > 0.0) u /= scale;
  const Eigen::VectorXd du = diff1(u, grid.dx);
  const Eigen::VectorXd ddu = diff2(u, grid.dx);
  Eigen::VectorXd g(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    g(i) = std::cosh(x) / m * (du(i) - (m - 1.0) * std::tanh(x) * u(i));
  }
  const Eigen::VectorXd dg = diff1(g, grid.dx);
  double worst = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.x(i);
    const double th = std::tanh(x);
    const double sech = 1.0 / std::cosh(x);
    const double r = ddu(i) + (2.0 - m) * th * du(i) - (m - 1.0) * (th * th - sech * sech) * u(i) +
                     (p - 2.0) * sech * dg(i) + lambda_hat * sech * sech * u(i);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

namespace {

std::vector<double> collocation_eigenvalues(const Params& params, int n) {
  const Chebyshev cheb(n);
  const double m = params.m;
  const double p = params.p;
  const Eigen::MatrixXd d2 = cheb.d1 * cheb.d1;
  const Eigen::ArrayXd s = cheb.nodes.array();
  Eigen::MatrixXd op = ((1.0 - s.square()).matrix().asDiagonal() * d2) -
                       (m + 2.0) * (s.matrix().asDiagonal() * cheb.d1);
  op *= (m + p - 2.0) / m;
  op.diagonal().array() += m - p;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(op, false);
  if (solver.info() != Eigen::Success) {
    throw NumericError(ErrorKind::EigenNotConverged, "eigenvalue_numeric: eigensolver failed");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(solver.eigenvalues().size()));
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) out.push_back(-solver.eigenvalues()(i).real());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<double> eigenvalue_numeric(const Params& params, int j_max, int n_grid) {
  if (j_max < 1) throw std::invalid_argument("j_max must be at least 1");
  if (n_grid < 8 * j_max) throw std::invalid_argument("n_grid must be at least 8 j_max");
  const auto coarse = collocation_eigenvalues(params, n_grid);
  const auto fine = collocation_eigenvalues(params, 2 * n_grid);
  std::vector<double> out(coarse.begin(), coarse.begin() + j_max);
  for (int j = 0; j < j_max; ++j) {
    const double diff = std::abs(coarse[j] - fine[j]);
    if (!(diff <= 1e-6 * std::max(1.0, std::abs(fine[j])))) {
      throw NumericError(ErrorKind::EigenNotConverged,
                         "eigenvalue_numeric: eigenvalue " + std::to_string(j + 1) + " moved by " +
                             std::to_string(diff) + " under grid doubling");
    }
  }
  return out;
}

const char* to_string(Formula f) {
  switch (f) {
    case Formula::Theorem: return "theorem";
    case Formula::Chain: return "chain";
    case Formula::Both: return "both";
    case Formula::Neither: return "neither";
  }
  return "unknown";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "Stable";
    case Verdict::Unstable: return "Unstable";
    case Verdict::Marginal: return "Marginal";
  }
  return "Unknown";
}

UniformGrid default_spectral_grid() { return UniformGrid::symmetric(25.0, 2.5e-3); }

SpectrumReport spectrum_report(const Params& params, int j_max, bool numeric, const UniformGrid& grid,
                               int n_grid) {
  if (j_max < 1) throw std::invalid_argument("j_max must be at least 1");
  SpectrumReport report;
  report.params = params;
  report.numeric = numeric;
  bool theorem_ok = true;
  bool chain_ok = true;
  for (int j = 1; j <= j_max; ++j) {
    EigenPair pair;
    pair.j = j;
    pair.lambda_hat_theorem = eigenvalue_theorem(j, params);
    pair.lambda_hat_chain = eigenvalue_chain(j, params);
    pair.lambda_hat_numeric = std::numeric_limits<double>::quiet_NaN();
    const auto xi = eigenfunction_samples(j, params.m, grid);
    pair.residual_theorem = jacobi_residual(xi, pair.lambda_hat_theorem, params, grid);
    pair.residual_chain = jacobi_residual(xi, pair.lambda_hat_chain, params, grid);
    theorem_ok = theorem_ok && pair.residual_theorem < kResidualAccept;
    chain_ok = chain_ok && pair.residual_chain < kResidualAccept;
    report.pairs.push_back(pair);
  }
  report.selected = theorem_ok && chain_ok ? Formula::Both
                    : theorem_ok           ? Formula::Theorem
                    : chain_ok             ? Formula::Chain
                                           : Formula::Neither;
  std::vector<double> values;
  if (numeric) values = eigenvalue_numeric(params, j_max, n_grid > 0 ? n_grid : std::max(32, 8 * j_max));
  const double scale = std::pow(static_cast<double>(params.m), 0.5 * params.p - 1.0);
  for (auto& pair : report.pairs) {
    pair.lambda_hat_selected = report.selected == Formula::Theorem ? pair.lambda_hat_theorem : pair.lambda_hat_chain;
    pair.lambda_unscaled = scale * pair.lambda_hat_selected;
    if (numeric) pair.lambda_hat_numeric = values[static_cast<std::size_t>(pair.j - 1)];
  }
  return report;
}

Verdict stability_verdict(const Params& params, int j_max) {
  if (j_max < 3) throw std::invalid_argument("stability_verdict: j_max must be at least 3");
  const SpectrumReport report = spectrum_report(params, j_max, false, default_spectral_grid());
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& pair : report.pairs) lowest = std::min(lowest, pair.lambda_hat_selected);
  if (std::abs(lowest) <= 1e-9) return Verdict::Marginal;
  return lowest > 0.0 ? Verdict::Stable : Verdict::Unstable;
}

}  // namespace pharm
