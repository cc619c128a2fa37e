#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace pharm {

/// Gauss-Legendre rule on [-1, 1] from the Golub-Welsch eigenproblem.
struct GaussLegendre {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  explicit GaussLegendre(int n);

  /// Rule applied to [a, b].
  template <typename F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < nodes.size(); ++i) sum += weights(i) * f(mid + half * nodes(i));
    return half * sum;
  }
};

/// Shared 10- and 5-point rules.
const GaussLegendre& gauss_legendre_10();
const GaussLegendre& gauss_legendre_5();

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Composite Gauss-Legendre over a partition; panels whose 10/5-point difference exceeds
/// `tol` times their share of the interval are bisected (at most `max_depth` times).
QuadratureResult integrate_partition(const std::function<double(double)>& f,
                                     std::span<const double> breakpoints, double tol = 1e-13,
                                     int max_depth = 12);

/// Uniform grid x_i = x0 + i dx, i = 0..n-1.
struct UniformGrid {
  double x0 = 0.0;
  double dx = 0.01;
  int n = 0;

  static UniformGrid symmetric(double half_width, double dx);
  double x(int i) const { return x0 + i * dx; }
  double x_end() const { return x(n - 1); }
};

std::vector<double> sample(const UniformGrid& grid, const std::function<double(double)>& f);

/// Fourth-order first derivative: central in the interior, one-sided at the two outer nodes.
Eigen::VectorXd diff1(const Eigen::VectorXd& f, double dx);

/// Fourth-order second derivative with one-sided boundary stencils.
Eigen::VectorXd diff2(const Eigen::VectorXd& f, double dx);

/// Composite Simpson rule on a uniform grid (odd node count; a trailing interval is
/// closed with the trapezoid-corrected 3/8 rule).
double simpson(const Eigen::VectorXd& f, double dx);

/// Chebyshev-Gauss-Lobatto nodes s_j = cos(pi j / n) and the differentiation matrix.
struct Chebyshev {
  Eigen::VectorXd nodes;
  Eigen::MatrixXd d1;

  explicit Chebyshev(int n);
};

/// Quintic Hermite interpolant on [x0, x1] from values, first and second derivatives.
struct QuinticHermite {
  double x0, len;
  double c[6];

  QuinticHermite(double x0, double x1, double f0, double d0, double s0, double f1, double d1, double s1);
  double value(double x) const;
  double deriv(double x) const;
  double second(double x) const;
};

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; fn must only touch slot i.
/// The first exception thrown by fn is rethrown after all workers have joined.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace pharm
