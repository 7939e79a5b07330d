#pragma once

// Independent reference computations used only by the tests. None of these
// call into the library's solver or eigen code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace oracle {

// Closed-form solution of x' = r x (1 - x) with x(0) = x0.
inline double logistic(double x0, double r, double tau) {
  const double e = std::exp(r * tau);
  return x0 * e / (1.0 - x0 + x0 * e);
}

// Time at which the logistic starting at x0 (rate r) reaches level c.
inline double logistic_inverse(double x0, double r, double c) {
  return std::log(c * (1.0 - x0) / (x0 * (1.0 - c))) / r;
}

struct Pair {
  double L;
  double S;
};

inline Pair lv_field(double a12, double a21, double rho, Pair x) {
  return {x.L * (1.0 - x.L - a12 * x.S), rho * x.S * (1.0 - x.S - a21 * x.L)};
}

// Classical fixed-step RK4 from tau = 0 to t_end. The last step is shortened
// to land on t_end exactly.
inline Pair rk4(double a12, double a21, double rho, Pair x, double t_end, double h) {
  double t = 0.0;
  while (t < t_end) {
    const double dt = std::min(h, t_end - t);
    const Pair k1 = lv_field(a12, a21, rho, x);
    const Pair k2 = lv_field(a12, a21, rho, {x.L + 0.5 * dt * k1.L, x.S + 0.5 * dt * k1.S});
    const Pair k3 = lv_field(a12, a21, rho, {x.L + 0.5 * dt * k2.L, x.S + 0.5 * dt * k2.S});
    const Pair k4 = lv_field(a12, a21, rho, {x.L + dt * k3.L, x.S + dt * k3.S});
    x.L += dt / 6.0 * (k1.L + 2.0 * k2.L + 2.0 * k3.L + k4.L);
    x.S += dt / 6.0 * (k1.S + 2.0 * k2.S + 2.0 * k3.S + k4.S);
    t += dt;
  }
  return x;
}

// Interior equilibrium by solving the 2x2 linear system with Eigen's LU.
inline Pair equilibrium_lu(double a12, double a21) {
  Eigen::Matrix2d A;
  A << 1.0, a12, a21, 1.0;
  const Eigen::Vector2d sol = A.partialPivLu().solve(Eigen::Vector2d(1.0, 1.0));
  return {sol(0), sol(1)};
}

// Eigenvalues of the explicit Jacobian at E*, ordered by decreasing magnitude.
inline std::pair<std::complex<double>, std::complex<double>> jacobian_eigenvalues(
    double a12, double a21, double rho) {
  const Pair e = equilibrium_lu(a12, a21);
  Eigen::Matrix2d J;
  J << -e.L, -a12 * e.L, -rho * a21 * e.S, -rho * e.S;
  const Eigen::EigenSolver<Eigen::Matrix2d> es(J, false);
  std::complex<double> a = es.eigenvalues()(0), b = es.eigenvalues()(1);
  if (std::abs(a) < std::abs(b)) std::swap(a, b);
  return {a, b};
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace oracle
