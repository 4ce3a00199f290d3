#pragma once

// Riemannian side of an (alpha, beta) pair: the metric a_ij(x), the 1-form
// b_i(x), the Levi-Civita connection, curvature of alpha and the covariant
// derivative apparatus of beta.  All x-derivatives come from jets.

#include <functional>
#include <memory>
#include <tuple>
#include <type_traits>
#include <utility>

#include "projflat/jet.hpp"
#include "projflat/tensor.hpp"

namespace projflat {

/// A Riemannian metric together with a 1-form, both evaluable at every jet
/// tier the engine uses (double .. J3).  Fields are supplied as generic
/// callables `(const Vec<T>&) -> Mat<T>` / `Vec<T>` and instantiated once
/// per tier.  Copies share the underlying closures.
class RiemannData {
 public:
  template <class T>
  using MatrixField = std::function<Mat<T>(const Vec<T>&)>;
  template <class T>
  using CovectorField = std::function<Vec<T>(const Vec<T>&)>;

  template <class AFn, class BFn>
  RiemannData(int dim, AFn a, BFn b) : dim_(dim) {
    if (dim < 1) {
      throw InvalidParameter("dimension must be positive");
    }
    auto impl = std::make_shared<Impl>();
    fill<double>(*impl, a, b);
    fill<J1>(*impl, a, b);
    fill<J2>(*impl, a, b);
    fill<J3>(*impl, a, b);
    impl_ = std::move(impl);
  }

  int dim() const noexcept { return dim_; }

  template <class T>
  Mat<T> a(const Vec<T>& x) const {
    return std::get<Fields<T>>(impl_->tiers).a(x);
  }

  template <class T>
  Vec<T> b(const Vec<T>& x) const {
    return std::get<Fields<T>>(impl_->tiers).b(x);
  }

 private:
  template <class T>
  struct Fields {
    MatrixField<T> a;
    CovectorField<T> b;
  };
  struct Impl {
    std::tuple<Fields<double>, Fields<J1>, Fields<J2>, Fields<J3>> tiers;
  };

  template <class T, class AFn, class BFn>
  static void fill(Impl& impl, const AFn& a, const BFn& b) {
    auto& f = std::get<Fields<T>>(impl.tiers);
    f.a = [a](const Vec<T>& x) -> Mat<T> { return a(x); };
    f.b = [b](const Vec<T>& x) -> Vec<T> { return b(x); };
  }

  int dim_;
  std::shared_ptr<const Impl> impl_;
};

/// Flat metric a = I with a constant 1-form.
RiemannData flat_parallel(Vec<double> b_const);

/// d a_ij / dx^m for m = 0..n-1, plus a(x) itself.
template <class S>
struct MetricDerivatives {
  Mat<S> a;
  std::vector<Mat<S>> da;  // da[m](i, j)
};

template <class S>
MetricDerivatives<S> metric_derivatives(const RiemannData& g, const Vec<S>& x) {
  const int n = g.dim();
  MetricDerivatives<S> out;
  out.da.reserve(n);
  for (int m = 0; m < n; ++m) {
    const Mat<Jet<S>> am = g.a(lift_axis(x, static_cast<std::size_t>(m)));
    if (m == 0) {
      out.a = Mat<S>(n);
    }
    Mat<S> d(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        d(i, j) = am(i, j).v1;
        if (m == 0) {
          out.a(i, j) = am(i, j).v0;
        }
      }
    }
    out.da.push_back(std::move(d));
  }
  return out;
}

/// Gamma^i_jk = 1/2 a^il (d_j a_lk + d_k a_jl - d_l a_jk).
template <class S>
Tensor3<S> christoffel(const RiemannData& g, const Vec<S>& x) {
  const int n = g.dim();
  const MetricDerivatives<S> md = metric_derivatives(g, x);
  const Mat<S> ainv = inverse(md.a);
  // Lowered symbols Gamma_ljk.
  Tensor3<S> low(n);
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        S v = 0.5 * (md.da[j](l, k) + md.da[k](j, l) - md.da[l](j, k));
        low(l, j, k) = v;
        low(l, k, j) = v;
      }
    }
  }
  Tensor3<S> gam(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        S acc(0.0);
        for (int l = 0; l < n; ++l) {
          acc += ainv(i, l) * low(l, j, k);
        }
        gam(i, j, k) = acc;
        gam(i, k, j) = acc;
      }
    }
  }
  return gam;
}

/// G^i_alpha = 1/2 Gamma^i_jk y^j y^k.
template <class Y>
Vec<Y> spray_from_christoffel(const Tensor3<double>& gam, const Vec<Y>& y) {
  const int n = gam.dim();
  Vec<Y> out(n, Y(0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        out[i] += 0.5 * gam(i, j, k) * y[j] * y[k];
      }
    }
  }
  return out;
}

template <class S>
Vec<S> spray_riemann(const RiemannData& g, const Vec<S>& x, const Vec<S>& y) {
  const int n = g.dim();
  const Tensor3<S> gam = christoffel(g, x);
  Vec<S> out(n, S(0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        out[i] += 0.5 * gam(i, j, k) * y[j] * y[k];
      }
    }
  }
  return out;
}

/// b_{i|j} = d_j b_i - b_k Gamma^k_ij.
template <class S>
Mat<S> covariant_derivative_beta(const RiemannData& g, const Vec<S>& x) {
  const int n = g.dim();
  const Tensor3<S> gam = christoffel(g, x);
  Mat<S> out(n);
  Vec<S> b(n, S(0.0));
  for (int j = 0; j < n; ++j) {
    const Vec<Jet<S>> bj = g.b(lift_axis(x, static_cast<std::size_t>(j)));
    for (int i = 0; i < n; ++i) {
      out(i, j) = bj[i].v1;
      if (j == 0) {
        b[i] = bj[i].v0;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        out(i, j) -= b[k] * gam(k, i, j);
      }
    }
  }
  return out;
}

/// Everything derived from the covariant derivative of beta at one point.
struct BetaDerivatives {
  Mat<double> a;      // a_ij
  Mat<double> ainv;   // a^ij
  Vec<double> b;      // b_i
  Vec<double> bup;    // b^i
  double b2 = 0.0;    // b^2 = a^ij b_i b_j
  Mat<double> bij;    // b_{i|j}
  Mat<double> r;      // r_ij
  Mat<double> s;      // s_ij
  Mat<double> s_up;   // s^i_j = a^ik s_kj
  Vec<double> sj;     // s_j = b^i s_ij
  Vec<double> si;     // s^i = a^ik s_k
  double r00 = 0.0;
  double s0 = 0.0;
};

BetaDerivatives beta_apparatus(const RiemannData& g, const Vec<double>& x, const Vec<double>& y);

/// R^i_jkl = d_k Gamma^i_jl - d_l Gamma^i_jk + Gamma^i_km Gamma^m_jl - Gamma^i_lm Gamma^m_jk.
Tensor4<double> riemann_curvature(const RiemannData& g, const Vec<double>& x);

/// max |d_k a_ij - Gamma^l_ki a_lj - Gamma^l_kj a_il| (zero for Levi-Civita).
double metric_compatibility_residual(const RiemannData& g, const Vec<double>& x);

}  // namespace projflat
