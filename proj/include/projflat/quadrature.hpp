#pragma once

#include <functional>

namespace projflat {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_floor = 1e-14;
  int max_depth = 60;
};

/// Adaptive Simpson rule with interval bisection and Richardson correction.
/// Throws ConvergenceError when max_depth is reached without meeting the
/// tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opts = {});

}  // namespace projflat
