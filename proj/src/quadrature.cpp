#include "projflat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "projflat/errors.hpp"

namespace projflat {
namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double eps,
                 int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * eps) {
      return left + right + delta / 15.0;
    }
    if (depth >= max_depth) {
      throw ConvergenceError("adaptive Simpson did not converge on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
  }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts) {
  if (a == b) {
    return 0.0;
  }
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  if (!std::isfinite(whole)) {
    throw ConvergenceError("integrand is not finite on the interval");
  }

  // A coarse pass fixes the scale for the relative tolerance.
  const Simpson rule{f, opts.max_depth};
  double scale = std::abs(whole);
  try {
    const double coarse = rule.recurse(a, b, fa, fm, fb, whole,
                                       std::max(1e-4 * scale, opts.abs_floor), 0);
    scale = std::abs(coarse);
  } catch (const ConvergenceError&) {
  }
  const double eps = std::max(opts.rel_tol * scale, opts.abs_floor);
  return rule.recurse(a, b, fa, fm, fb, whole, eps, 0);
}

}  // namespace projflat
