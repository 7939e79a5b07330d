#include "lvc/root_finding.hpp"

#include <cmath>

#include "lvc/error.hpp"

namespace lvc {

BracketedRoot find_root_bracketed(const std::function<double(double)>& f, double a, double b,
                                  double fa, double fb, double x_tol) {
  if (!(a <= b)) {
    throw Error(ErrorKind::InvalidArgument, "root bracket must satisfy a <= b");
  }
  if (fa == 0.0) {
    return {a, 0};
  }
  if (fb == 0.0) {
    return {b, 0};
  }
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "root bracket endpoints do not straddle a sign change");
  }

  int it = 0;
  bool use_secant = true;
  constexpr int kMaxIterations = 200;
  while (b - a > x_tol && it < kMaxIterations) {
    ++it;
    const double width = b - a;
    double x = 0.5 * (a + b);
    if (use_secant) {
      const double s = b - fb * (b - a) / (fb - fa);
      // Keep the candidate strictly inside the bracket.
      if (s > a && s < b) {
        x = s;
      }
    }
    const double fx = f(x);
    if (fx == 0.0) {
      return {x, it};
    }
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    // A secant step that fails to halve the bracket is followed by bisection.
    use_secant = (b - a) <= 0.5 * width;
  }
  return {0.5 * (a + b), it};
}

}  // namespace lvc
