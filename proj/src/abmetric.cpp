#include "projflat/abmetric.hpp"

#include <algorithm>
#include <cmath>

namespace projflat {

double f_eval(const ABMetric& M, const Vec<double>& x, const Vec<double>& y) { return M.F(x, y); }

SprayResult spray_result(const Vec<double>& G, const Vec<double>& y) {
  const ProjectiveFit<double> fit = projective_fit(G, y);
  return {G, fit.P, fit.residual};
}

double projective_factor(const ABMetric& M, const Vec<double>& x, const Vec<double>& y, double tol) {
  const ProjectiveFit<double> fit = projective_fit(spray_generic(M, x, y), y);
  if (fit.residual > tol) {
    throw NotProjectivelyFlatError(fit.residual, tol);
  }
  return fit.P;
}

double flag_curvature_projflat(const ABMetric& M, const Vec<double>& x, const Vec<double>& y,
                               double tol) {
  const Vec<J1> xl = lift(x, y);
  const Vec<J1> yl = constant_lift(y);
  const Vec<J1> G = spray_generic(M, xl, yl);
  const ProjectiveFit<J1> fit = projective_fit(G, yl);
  if (fit.residual > tol) {
    throw NotProjectivelyFlatError(fit.residual, tol);
  }
  const double F = M.F(x, y);
  return (fit.P.v0 * fit.P.v0 - fit.P.v1) / (F * F);
}

double spray_cubic_residual(const ABMetric& M, const Vec<double>& x, const Vec<double>& y) {
  const int n = M.dim();
  std::vector<Vec<double>> dirs;
  for (int i = 0; i < n; ++i) {
    Vec<double> e(n, 0.0);
    e[i] = 1.0;
    dirs.push_back(std::move(e));
  }
  dirs.emplace_back(n, 1.0 / std::sqrt(static_cast<double>(n)));

  // D^3 is homogeneous of degree -1 in y; evaluate at the unit vector.
  const double ynorm = std::sqrt(dot(y, y));
  Vec<double> yu(y);
  for (double& v : yu) {
    v /= ynorm;
  }

  double worst = 0.0;
  for (const auto& u : dirs) {
    // y(t, r) = y + t u + r u; the outer tier differentiates in t, the inner in r.
    Vec<J2> yl;
    yl.reserve(n);
    for (int i = 0; i < n; ++i) {
      yl.emplace_back(J1(yu[i], u[i], 0.0), J1(u[i], 0.0, 0.0), J1(0.0));
    }
    const StructuredTerms<J2> t = spray_structured_terms(M, x, yl);
    for (int i = 0; i < n; ++i) {
      const double a = t.s_term[i].v2.v1;
      const double b = t.y_term[i].v2.v1;
      const double c = t.b_term[i].v2.v1;
      const double total = t.G_alpha[i].v2.v1 + a + b + c;
      worst = std::max(worst, std::abs(total) / std::max({1.0, std::abs(a), std::abs(b), std::abs(c)}));
    }
  }
  return worst;
}
}  // namespace projflat
