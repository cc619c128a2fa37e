#include "pharm/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/Eigenvalues>

namespace pharm {

GaussLegendre::GaussLegendre(int n) {
  if (n < 1) throw std::invalid_argument("GaussLegendre: n must be positive");
  // Jacobi matrix of the Legendre recurrence: off-diagonal k / sqrt(4k^2 - 1).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  nodes = eig.eigenvalues();
  weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
}

const GaussLegendre& gauss_legendre_10() {
  static const GaussLegendre rule(10);
  return rule;
}

const GaussLegendre& gauss_legendre_5() {
  static const GaussLegendre rule(5);
  return rule;
}

namespace {

void panel(const std::function<double(double)>& f, double a, double b, double tol_density, int depth,
           QuadratureResult& acc) {
  const double fine = gauss_legendre_10().integrate(f, a, b);
  const double coarse = gauss_legendre_5().integrate(f, a, b);
  const double err = std::abs(fine - coarse);
  // Differences at the rounding level of the panel value cannot be reduced by bisection.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(fine);
  if (depth <= 0 || err <= std::max(tol_density * (b - a), floor) || !std::isfinite(err)) {
    acc.value += fine;
    acc.error += err;
    return;
  }
  const double mid = 0.5 * (a + b);
  panel(f, a, mid, tol_density, depth - 1, acc);
  panel(f, mid, b, tol_density, depth - 1, acc);
}

}  // namespace

QuadratureResult integrate_partition(const std::function<double(double)>& f,
                                     std::span<const double> breakpoints, double tol, int max_depth) {
  QuadratureResult acc;
  if (breakpoints.size() < 2) return acc;
  const double span = breakpoints.back() - breakpoints.front();
  const double density = span > 0.0 ? tol / span : tol;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (b > a) panel(f, a, b, density, max_depth, acc);
  }
  return acc;
}

UniformGrid UniformGrid::symmetric(double half_width, double dx) {
  const int half = static_cast<int>(std::ceil(half_width / dx - 1e-9));
  return UniformGrid{-half * dx, dx, 2 * half + 1};
}

std::vector<double> sample(const UniformGrid& grid, const std::function<double(double)>& f) {
  std::vector<double> out(grid.n);
  for (int i = 0; i < grid.n; ++i) out[i] = f(grid.x(i));
  return out;
}

Eigen::VectorXd diff1(const Eigen::VectorXd& f, double dx) {
  const Eigen::Index n = f.size();
  if (n < 5) throw std::invalid_argument("diff1: need at least 5 points");
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 2; i < n - 2; ++i) {
    d(i) = (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * dx);
  }
  const auto fwd = [&](Eigen::Index i, double s) {
    // s = +1 forward, -1 backward; exact for quartics.
    const auto at = [&](int k) { return f(i + static_cast<Eigen::Index>(s) * k); };
    return s * (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) / (12.0 * dx);
  };
  const auto skew = [&](Eigen::Index i, double s) {
    const auto at = [&](int k) { return f(i + static_cast<Eigen::Index>(s) * k); };
    return s * (-3.0 * at(-1) - 10.0 * at(0) + 18.0 * at(1) - 6.0 * at(2) + at(3)) / (12.0 * dx);
  };
  d(0) = fwd(0, 1.0);
  d(1) = skew(1, 1.0);
  d(n - 1) = fwd(n - 1, -1.0);
  d(n - 2) = skew(n - 2, -1.0);
  return d;
}

Eigen::VectorXd diff2(const Eigen::VectorXd& f, double dx) {
  const Eigen::Index n = f.size();
  if (n < 6) throw std::invalid_argument("diff2: need at least 6 points");
  const double dx2 = dx * dx;
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 2; i < n - 2; ++i) {
    d(i) = (-f(i - 2) + 16.0 * f(i - 1) - 30.0 * f(i) + 16.0 * f(i + 1) - f(i + 2)) / (12.0 * dx2);
  }
  const auto one_sided = [&](Eigen::Index i, int s) {
    const auto at = [&](int k) { return f(i + s * k); };
    return (45.0 * at(0) - 154.0 * at(1) + 214.0 * at(2) - 156.0 * at(3) + 61.0 * at(4) - 10.0 * at(5)) /
           (12.0 * dx2);
  };
  const auto skew = [&](Eigen::Index i, int s) {
    const auto at = [&](int k) { return f(i + s * k); };
    return (10.0 * at(-1) - 15.0 * at(0) - 4.0 * at(1) + 14.0 * at(2) - 6.0 * at(3) + at(4)) / (12.0 * dx2);
  };
  d(0) = one_sided(0, 1);
  d(1) = skew(1, 1);
  d(n - 1) = one_sided(n - 1, -1);
  d(n - 2) = skew(n - 2, -1);
  return d;
}

double simpson(const Eigen::VectorXd& f, double dx) {
  const Eigen::Index n = f.size();
  if (n < 4) throw std::invalid_argument("simpson: need at least 4 points");
  Eigen::Index last = n - 1;
  double tail = 0.0;
  if (last % 2 == 1) {
    // Simpson 3/8 on the final three intervals.
    tail = 3.0 * dx / 8.0 * (f(last - 3) + 3.0 * f(last - 2) + 3.0 * f(last - 1) + f(last));
    last -= 3;
  }
  double sum = f(0) + f(last);
  for (Eigen::Index i = 1; i < last; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(i);
  return dx / 3.0 * sum + tail;
}

Chebyshev::Chebyshev(int n) {
  if (n < 2) throw std::invalid_argument("Chebyshev: n must be at least 2");
  nodes.resize(n + 1);
  for (int j = 0; j <= n; ++j) nodes(j) = std::cos(std::numbers::pi * j / n);
  Eigen::VectorXd c = Eigen::VectorXd::Ones(n + 1);
  c(0) = c(n) = 2.0;
  for (int j = 0; j <= n; ++j) {
    if (j % 2 == 1) c(j) = -c(j);
  }
  d1 = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i != j) d1(i, j) = (c(i) / c(j)) / (nodes(i) - nodes(j));
    }
  }
  // Negative-sum trick for the diagonal.
  for (int i = 0; i <= n; ++i) d1(i, i) = -d1.row(i).sum();
}

QuinticHermite::QuinticHermite(double x0_, double x1, double f0, double d0, double s0, double f1, double d1,
                               double s1)
    : x0(x0_), len(x1 - x0_) {
  // Coefficients in u = (x - x0) / len.
  const double D0 = d0 * len, D1 = d1 * len, S0 = s0 * len * len, S1 = s1 * len * len;
  c[0] = f0;
  c[1] = D0;
  c[2] = 0.5 * S0;
  c[3] = 10.0 * (f1 - f0) - 6.0 * D0 - 4.0 * D1 - 1.5 * S0 + 0.5 * S1;
  c[4] = -15.0 * (f1 - f0) + 8.0 * D0 + 7.0 * D1 + 1.5 * S0 - S1;
  c[5] = 6.0 * (f1 - f0) - 3.0 * (D0 + D1) - 0.5 * S0 + 0.5 * S1;
}

double QuinticHermite::value(double x) const {
  const double u = (x - x0) / len;
  return c[0] + u * (c[1] + u * (c[2] + u * (c[3] + u * (c[4] + u * c[5]))));
}

double QuinticHermite::deriv(double x) const {
  const double u = (x - x0) / len;
  return (c[1] + u * (2.0 * c[2] + u * (3.0 * c[3] + u * (4.0 * c[4] + u * 5.0 * c[5])))) / len;
}

double QuinticHermite::second(double x) const {
  const double u = (x - x0) / len;
  return (2.0 * c[2] + u * (6.0 * c[3] + u * (12.0 * c[4] + u * 20.0 * c[5]))) / (len * len);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pharm
