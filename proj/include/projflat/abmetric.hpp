#pragma once

// F = alpha phi(beta/alpha): evaluation, fundamental tensor, the two spray
// routes, projective factor and flag curvature of projectively flat metrics.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <utility>

#include "projflat/jet.hpp"
#include "projflat/phi.hpp"
#include "projflat/riemann.hpp"
#include "projflat/tensor.hpp"

namespace projflat {

class ABMetric {
 public:
  ABMetric(RiemannData geom, PhiSpec phi) : geom_(std::move(geom)), phi_(std::move(phi)) {}

  const RiemannData& geom() const noexcept { return geom_; }
  const PhiSpec& phi() const noexcept { return phi_; }
  int dim() const noexcept { return geom_.dim(); }

  template <class T>
  T alpha(const Vec<T>& x, const Vec<T>& y) const {
    return sqrt(bilinear(geom_.a(x), y, y));
  }

  template <class T>
  T beta(const Vec<T>& x, const Vec<T>& y) const {
    return dot(geom_.b(x), y);
  }

  template <class T>
  T F(const Vec<T>& x, const Vec<T>& y) const {
    const T a2 = bilinear(geom_.a(x), y, y);
    if (value_of(a2) <= 0.0) {
      throw DomainError("alpha vanishes: y = 0 or a(x) not positive definite");
    }
    const T al = sqrt(a2);
    const T s = dot(geom_.b(x), y) / al;
    return al * phi_(s);
  }

 private:
  RiemannData geom_;
  PhiSpec phi_;
};

struct SprayResult {
  Vec<double> G;
  std::optional<double> P;
  double antisym_residual = 0.0;
};

double f_eval(const ABMetric& M, const Vec<double>& x, const Vec<double>& y);

/// Least-squares collinearity fit G ~ P y.
template <class T>
struct ProjectiveFit {
  T P;
  double residual;  // max_{i<j} |G^i y^j - G^j y^i| / (1 + |G||y|) on leading values
};

template <class T>
ProjectiveFit<T> projective_fit(const Vec<T>& G, const Vec<T>& y) {
  const T P = dot(G, y) / dot(y, y);
  double gn = 0.0;
  double yn = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    gn += value_of(G[i]) * value_of(G[i]);
    yn += value_of(y[i]) * value_of(y[i]);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = i + 1; j < y.size(); ++j) {
      worst = std::max(worst, std::abs(value_of(G[i]) * value_of(y[j]) - value_of(G[j]) * value_of(y[i])));
    }
  }
  return {P, worst / (1.0 + std::sqrt(gn) * std::sqrt(yn))};
}

namespace abmetric_detail {

// D^2 along a seed in the joint (x, y) space of F^2.
template <class S>
Jet<S> f2_along(const ABMetric& M, const Vec<S>& x, const Vec<S>& y, std::span<const double> sx,
                std::span<const double> sy) {
  const Vec<Jet<S>> xl = lift(x, sx);
  const Vec<Jet<S>> yl = lift(y, sy);
  const Jet<S> f = M.F(xl, yl);
  return f * f;
}

}  // namespace abmetric_detail

/// g_ij = 1/2 [F^2]_{y^i y^j}.
template <class S>
Mat<S> fundamental_tensor(const ABMetric& M, const Vec<S>& x, const Vec<S>& y) {
  const int n = M.dim();
  const Vec<double> zero(n, 0.0);
  std::vector<S> diag(n);
  for (int i = 0; i < n; ++i) {
    Vec<double> e(n, 0.0);
    e[i] = 1.0;
    diag[i] = abmetric_detail::f2_along(M, x, y, zero, e).v2;
  }
  Mat<S> g(n);
  for (int i = 0; i < n; ++i) {
    g(i, i) = 0.5 * diag[i];
    for (int j = i + 1; j < n; ++j) {
      Vec<double> e(n, 0.0);
      e[i] = 1.0;
      e[j] = 1.0;
      const S dij = abmetric_detail::f2_along(M, x, y, zero, e).v2;
      const S hij = 0.5 * (dij - diag[i] - diag[j]);
      g(i, j) = 0.5 * hij;
      g(j, i) = g(i, j);
    }
  }
  return g;
}

/// G^i = 1/4 g^il { [F^2]_{x^k y^l} y^k - [F^2]_{x^l} }, every derivative by jets.
template <class S>
Vec<S> spray_generic(const ABMetric& M, const Vec<S>& x, const Vec<S>& y) {
  const int n = M.dim();
  const Vec<double> zero(n, 0.0);
  std::vector<S> dyy(n);
  std::vector<S> dxx(n);
  std::vector<S> fx(n);
  for (int i = 0; i < n; ++i) {
    Vec<double> e(n, 0.0);
    e[i] = 1.0;
    dyy[i] = abmetric_detail::f2_along(M, x, y, zero, e).v2;
    const Jet<S> jx = abmetric_detail::f2_along(M, x, y, e, zero);
    dxx[i] = jx.v2;
    fx[i] = jx.v1;
  }
  Mat<S> g(n);
  for (int i = 0; i < n; ++i) {
    g(i, i) = 0.5 * dyy[i];
    for (int j = i + 1; j < n; ++j) {
      Vec<double> e(n, 0.0);
      e[i] = 1.0;
      e[j] = 1.0;
      const S dij = abmetric_detail::f2_along(M, x, y, zero, e).v2;
      g(i, j) = 0.25 * (dij - dyy[i] - dyy[j]);
      g(j, i) = g(i, j);
    }
  }
  // rhs_l = [F^2]_{x^k y^l} y^k - [F^2]_{x^l}
  Vec<S> rhs(n, S(0.0));
  for (int l = 0; l < n; ++l) {
    Vec<double> ey(n, 0.0);
    ey[l] = 1.0;
    for (int k = 0; k < n; ++k) {
      Vec<double> ex(n, 0.0);
      ex[k] = 1.0;
      const S dkl = abmetric_detail::f2_along(M, x, y, ex, ey).v2;
      const S mixed = 0.5 * (dkl - dxx[k] - dyy[l]);
      rhs[l] += mixed * y[k];
    }
    rhs[l] -= fx[l];
  }
  const Mat<S> ginv = inverse(g);
  Vec<S> G(n, S(0.0));
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      G[i] += 0.25 * ginv(i, l) * rhs[l];
    }
  }
  return G;
}

/// Q, Q', Delta, Theta, Psi of the structured spray formula at (s, b^2).
template <class T>
struct StructuredCoefficients {
  T Q, dQ, Delta, Theta, Psi;
};

template <class T>
StructuredCoefficients<T> structured_coefficients(const PhiSpec& phi, const T& s, const T& b2) {
  const Jet<T> v = phi(Jet<T>(s, T(1.0), T(0.0)));
  const T denom = v.v0 - s * v.v1;
  if (value_of(denom) == 0.0) {
    throw DomainError("phi - s phi' vanishes (Q undefined)");
  }
  StructuredCoefficients<T> c;
  c.Q = v.v1 / denom;
  c.dQ = v.v0 * v.v2 / (denom * denom);
  c.Delta = T(1.0) + s * c.Q + (b2 - s * s) * c.dQ;
  if (value_of(c.Delta) == 0.0) {
    throw DomainError("Delta = 1 + sQ + (b^2 - s^2)Q' vanishes");
  }
  c.Theta = (c.Q - s * c.dQ) / (2.0 * c.Delta);
  c.Psi = c.dQ / (2.0 * c.Delta);
  return c;
}

/// The four summands of the structured spray
///   G^i = G^i_a + a Q s^i_0 + a^-1 Theta (-2 a Q s_0 + r_00) y^i + Psi (-2 a Q s_0 + r_00) b^i
/// at a real base point; y may be lifted to any jet tier.
template <class Y>
struct StructuredTerms {
  Vec<Y> G_alpha;
  Vec<Y> s_term;
  Vec<Y> y_term;
  Vec<Y> b_term;
};

template <class Y>
StructuredTerms<Y> spray_structured_terms(const ABMetric& M, const Vec<double>& x, const Vec<Y>& y) {
  const int n = M.dim();
  const RiemannData& g = M.geom();
  const Tensor3<double> gam = christoffel(g, x);
  const BetaDerivatives bd = beta_apparatus(g, x, Vec<double>(n, 0.0));

  Y a2(0.0);
  Y be(0.0);
  Y r00(0.0);
  Y s0(0.0);
  for (int i = 0; i < n; ++i) {
    be += bd.b[i] * y[i];
    s0 += bd.sj[i] * y[i];
    for (int j = 0; j < n; ++j) {
      a2 += bd.a(i, j) * y[i] * y[j];
      r00 += bd.r(i, j) * y[i] * y[j];
    }
  }
  if (value_of(a2) <= 0.0) {
    throw DomainError("alpha vanishes");
  }
  const Y al = sqrt(a2);
  const Y s = be / al;
  const StructuredCoefficients<Y> c = structured_coefficients(M.phi(), s, Y(bd.b2));

  StructuredTerms<Y> t;
  t.G_alpha = spray_from_christoffel(gam, y);
  t.s_term.assign(n, Y(0.0));
  t.y_term.assign(n, Y(0.0));
  t.b_term.assign(n, Y(0.0));
  const Y common = -2.0 * al * c.Q * s0 + r00;
  for (int i = 0; i < n; ++i) {
    Y si0(0.0);
    for (int j = 0; j < n; ++j) {
      si0 += bd.s_up(i, j) * y[j];
    }
    t.s_term[i] = al * c.Q * si0;
    t.y_term[i] = c.Theta * common * y[i] / al;
    t.b_term[i] = c.Psi * common * bd.bup[i];
  }
  return t;
}

template <class Y>
Vec<Y> spray_structured(const ABMetric& M, const Vec<double>& x, const Vec<Y>& y) {
  const StructuredTerms<Y> t = spray_structured_terms(M, x, y);
  Vec<Y> G = t.G_alpha;
  for (std::size_t i = 0; i < G.size(); ++i) {
    G[i] += t.s_term[i] + t.y_term[i] + t.b_term[i];
  }
  return G;
}

SprayResult spray_result(const Vec<double>& G, const Vec<double>& y);

/// P = (G . y) / |y|^2, provided the spray is collinear with y within tol.
double projective_factor(const ABMetric& M, const Vec<double>& x, const Vec<double>& y, double tol = 1e-8);

/// K = (P^2 - P_{x^k} y^k) / F^2 with the x-derivative obtained by lifting
/// the whole projective-factor evaluation to jets.
double flag_curvature_projflat(const ABMetric& M, const Vec<double>& x, const Vec<double>& y,
                               double tol = 1e-8);

/// Third directional y-derivatives of the spray; zero iff G is quadratic in y.
/// G_alpha is quadratic, so this is D^3 of the three beta-dependent summands.
/// Returns max_{u, i} |sum of D^3 summands| / max(1, sum of |D^3 summand|)
/// over coordinate axes and the diagonal direction, each derivative taken
/// at unit |y|.  Near the boundary of strong convexity the summands grow
/// like 1/Delta^3 and cancel, so the sum alone is dominated by round-off.
double spray_cubic_residual(const ABMetric& M, const Vec<double>& x, const Vec<double>& y);

}  // namespace projflat
