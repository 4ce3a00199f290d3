#include "projflat/riemann.hpp"

#include <algorithm>
#include <cmath>

namespace projflat {

RiemannData flat_parallel(Vec<double> b_const) {
  const int n = static_cast<int>(b_const.size());
  return RiemannData(
      n, [n](const auto& x) { return Mat<typename std::decay_t<decltype(x)>::value_type>::identity(n); },
      [b_const](const auto& x) {
        using T = typename std::decay_t<decltype(x)>::value_type;
        return Vec<T>(b_const.begin(), b_const.end());
      });
}

BetaDerivatives beta_apparatus(const RiemannData& g, const Vec<double>& x, const Vec<double>& y) {
  const int n = g.dim();
  BetaDerivatives d;
  d.a = g.a(x);
  d.ainv = inverse(d.a);
  d.b = g.b(x);
  d.bup = mat_vec(d.ainv, d.b);
  d.b2 = dot(d.b, d.bup);
  d.bij = covariant_derivative_beta(g, x);
  d.r = Mat<double>(n);
  d.s = Mat<double>(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      d.r(i, j) = 0.5 * (d.bij(i, j) + d.bij(j, i));
      d.s(i, j) = 0.5 * (d.bij(i, j) - d.bij(j, i));
    }
  }
  d.s_up = Mat<double>(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        acc += d.ainv(i, k) * d.s(k, j);
      }
      d.s_up(i, j) = acc;
    }
  }
  d.sj.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      d.sj[j] += d.bup[i] * d.s(i, j);
    }
  }
  d.si = mat_vec(d.ainv, d.sj);
  d.r00 = bilinear(d.r, y, y);
  d.s0 = dot(d.sj, y);
  return d;
}

Tensor4<double> riemann_curvature(const RiemannData& g, const Vec<double>& x) {
  const int n = g.dim();
  const Tensor3<double> gam = christoffel(g, x);
  // dgam[k](i, j, l) = d_k Gamma^i_jl
  std::vector<Tensor3<double>> dgam;
  dgam.reserve(n);
  for (int k = 0; k < n; ++k) {
    const Tensor3<J1> gk = christoffel(g, lift_axis(x, static_cast<std::size_t>(k)));
    Tensor3<double> d(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
          d(i, j, l) = gk(i, j, l).v1;
        }
      }
    }
    dgam.push_back(std::move(d));
  }
  Tensor4<double> r(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
          double v = dgam[k](i, j, l) - dgam[l](i, j, k);
          for (int m = 0; m < n; ++m) {
            v += gam(i, k, m) * gam(m, j, l) - gam(i, l, m) * gam(m, j, k);
          }
          r(i, j, k, l) = v;
          r(i, j, l, k) = -v;
        }
      }
    }
  }
  return r;
}

double metric_compatibility_residual(const RiemannData& g, const Vec<double>& x) {
  const int n = g.dim();
  const MetricDerivatives<double> md = metric_derivatives(g, x);
  const Tensor3<double> gam = christoffel(g, x);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double v = md.da[k](i, j);
        for (int l = 0; l < n; ++l) {
          v -= gam(l, k, i) * md.a(l, j) + gam(l, k, j) * md.a(i, l);
        }
        worst = std::max(worst, std::abs(v));
      }
    }
  }
  return worst;
}

}  // namespace projflat
