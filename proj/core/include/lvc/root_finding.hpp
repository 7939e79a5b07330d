#pragma once

#include <functional>

namespace lvc {

struct BracketedRoot {
  double x = 0.0;
  int iterations = 0;
};

// Locates a sign change of f on [a, b] given f(a) = fa and f(b) = fb with
// fa * fb <= 0. Secant steps are taken while they shrink the bracket fast
// enough; otherwise the step falls back to bisection. Stops once the bracket
// is narrower than x_tol or f vanishes exactly. The returned x lies inside
// the final bracket, so it is within x_tol of a true sign change.
BracketedRoot find_root_bracketed(const std::function<double(double)>& f, double a, double b,
                                  double fa, double fb, double x_tol);

}  // namespace lvc
