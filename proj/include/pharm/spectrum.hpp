#pragma once

#include <span>
#include <string>
#include <vector>

#include "pharm/errors.hpp"
#include "pharm/model.hpp"
#include "pharm/numerics.hpp"

namespace pharm {

/// C_n^{(alpha)}(s) by the three-term recurrence.
double gegenbauer(int n, double alpha, double s);

/// -2m + p + j(j + m - 1), the stated closed form.
double eigenvalue_theorem(int j, const Params& params);

/// (m + p - 2)(j - 1)(j + m)/m + p - m: the Jacobi equation rewritten for f = cosh(x) xi
/// combined with the Gegenbauer eigenvalue (j - 1)(j + m).
double eigenvalue_chain(int j, const Params& params);

/// xi_j(x) = sech(x) C_{j-1}^{((m+1)/2)}(tanh x).
double eigenfunction(int j, int m, double x);

/// Samples of eigenfunction(j, m, .) on a grid.
std::vector<double> eigenfunction_samples(int j, int m, const UniformGrid& grid);

/// Max-norm residual of the Jacobi spectral problem at the identity,
///   xi'' + (2-m) tanh xi' - (m-1)(tanh^2 - sech^2) xi
///     + (p-2)/cosh (cosh/m (xi' - (m-1) tanh xi))' + lambda sech^2 xi,
/// for xi scaled to unit max norm, with fourth-order differences.
/// Throws NumericError(GridTooCoarse) unless the grid covers [-20, 20] with dx <= 1e-2.
double jacobi_residual(std::span<const double> xi, double lambda_hat, const Params& params,
                       const UniformGrid& grid);

/// Lowest j_max eigenvalues lambda_hat by Chebyshev collocation of
///   (m+p-2)/m ((1-s^2) w'' - (m+2) s w') + (m-p) w = -lambda_hat w,  xi = sech(x) w(tanh x),
/// which is the spectral problem rewritten in s = tanh x. Compared against 2 n_grid;
/// throws NumericError(EigenNotConverged) when the two differ by more than 1e-6.
/// Requires n_grid >= 8 j_max.
std::vector<double> eigenvalue_numeric(const Params& params, int j_max, int n_grid);

enum class Formula { Theorem, Chain, Both, Neither };
enum class Verdict { Stable, Unstable, Marginal };

const char* to_string(Formula f);
const char* to_string(Verdict v);

struct EigenPair {
  int j = 1;
  double lambda_hat_theorem = 0.0;
  double lambda_hat_chain = 0.0;
  double lambda_hat_numeric = 0.0;  // NaN unless requested
  double lambda_hat_selected = 0.0;
  double lambda_unscaled = 0.0;  // m^{p/2-1} lambda_hat_selected
  double residual_theorem = 0.0;
  double residual_chain = 0.0;
};

struct SpectrumReport {
  Params params;
  std::vector<EigenPair> pairs;
  /// Closed form whose residual stays below 1e-6 for every j (Both when they coincide).
  Formula selected = Formula::Neither;
  bool numeric = false;
};

inline constexpr double kResidualAccept = 1e-6;

/// Both closed forms with residuals on `grid`, adjudication, optional numeric eigenvalues.
SpectrumReport spectrum_report(const Params& params, int j_max, bool numeric, const UniformGrid& grid,
                               int n_grid = 0);

UniformGrid default_spectral_grid();

/// Sign of the smallest adjudicated eigenvalue; |lambda| <= 1e-9 is Marginal.
Verdict stability_verdict(const Params& params, int j_max);

}  // namespace pharm
