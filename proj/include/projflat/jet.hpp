#pragma once

// Order-2 truncated Taylor arithmetic along a single direction.
//
// A Jet<T> carries (f, f', f'') of a scalar function restricted to the line
// t -> x + t v at t = 0.  The coefficient type T may itself be a jet, which
// gives mixed derivatives in two or three independent directions: the outer
// jet differentiates along its own seed while the inner parts keep tracking
// theirs.  Everything above first derivatives in this library (Hessians of
// F^2, x-derivatives of the projective factor, Christoffel derivatives) is
// built from nesting this one type.

#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "projflat/errors.hpp"

namespace projflat {

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

template <class T>
struct Jet;

template <class T>
struct is_jet : std::false_type {};
template <class T>
struct is_jet<Jet<T>> : std::true_type {};
template <class T>
inline constexpr bool is_jet_v = is_jet<T>::value;

/// Leading real value of a scalar at any nesting depth.
constexpr double value_of(double x) noexcept { return x; }
template <class T>
constexpr double value_of(const Jet<T>& x) noexcept {
  return value_of(x.v0);
}

template <class T>
struct Jet {
  using value_type = T;

  T v0{};
  T v1{};
  T v2{};

  constexpr Jet() = default;
  constexpr Jet(double c) : v0(c), v1(0.0), v2(0.0) {}  // NOLINT: constants lift implicitly
  constexpr Jet(const T& c)  // NOLINT
    requires(!std::is_same_v<T, double>)
      : v0(c), v1(0.0), v2(0.0) {}
  constexpr Jet(T f, T df, T d2f) : v0(std::move(f)), v1(std::move(df)), v2(std::move(d2f)) {}

  friend Jet operator+(const Jet& a, const Jet& b) { return {a.v0 + b.v0, a.v1 + b.v1, a.v2 + b.v2}; }
  friend Jet operator-(const Jet& a, const Jet& b) { return {a.v0 - b.v0, a.v1 - b.v1, a.v2 - b.v2}; }
  friend Jet operator-(const Jet& a) { return {-a.v0, -a.v1, -a.v2}; }
  friend Jet operator+(const Jet& a) { return a; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    return {a.v0 * b.v0, a.v1 * b.v0 + a.v0 * b.v1, a.v2 * b.v0 + 2.0 * (a.v1 * b.v1) + a.v0 * b.v2};
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (value_of(b.v0) == 0.0) {
      throw DomainError("jet division by zero");
    }
    T q0 = a.v0 / b.v0;
    T q1 = (a.v1 - q0 * b.v1) / b.v0;
    T q2 = (a.v2 - 2.0 * (q1 * b.v1) - q0 * b.v2) / b.v0;
    return {std::move(q0), std::move(q1), std::move(q2)};
  }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }
};

using Jet2 = Jet<double>;
// Nesting tiers used throughout the engine.
using J1 = Jet<double>;
using J2 = Jet<J1>;
using J3 = Jet<J2>;

namespace detail {

// Composition with a univariate function whose value and first two
// derivatives at a.v0 are f0, f1, f2.
template <class T>
Jet<T> chain(const Jet<T>& a, T f0, T f1, T f2) {
  T d1 = f1 * a.v1;
  T d2 = f2 * (a.v1 * a.v1) + f1 * a.v2;
  return {std::move(f0), std::move(d1), std::move(d2)};
}

inline bool is_integral(double p) { return std::floor(p) == p; }

}  // namespace detail

template <class T>
Jet<T> sqrt(const Jet<T>& a) {
  if (value_of(a.v0) <= 0.0) {
    throw DomainError("sqrt of a non-positive jet");
  }
  T r = sqrt(a.v0);
  T f1 = 0.5 / r;
  T f2 = -0.25 / (r * a.v0);
  return detail::chain(a, std::move(r), std::move(f1), std::move(f2));
}

template <class T>
Jet<T> exp(const Jet<T>& a) {
  T e = exp(a.v0);
  return detail::chain(a, e, e, e);
}

template <class T>
Jet<T> log(const Jet<T>& a) {
  if (value_of(a.v0) <= 0.0) {
    throw DomainError("log of a non-positive jet");
  }
  T inv = 1.0 / a.v0;
  return detail::chain(a, log(a.v0), inv, -(inv * inv));
}

template <class T>
Jet<T> sin(const Jet<T>& a) {
  T s = sin(a.v0);
  T c = cos(a.v0);
  return detail::chain(a, s, c, -s);
}

template <class T>
Jet<T> cos(const Jet<T>& a) {
  T s = sin(a.v0);
  T c = cos(a.v0);
  return detail::chain(a, c, -s, -c);
}

/// Real power with a constant exponent.  Negative bases are accepted only
/// for integral exponents.
template <class T>
Jet<T> pow(const Jet<T>& a, double p) {
  const double base = value_of(a.v0);
  const bool integral = detail::is_integral(p);
  if (base < 0.0 && !integral) {
    throw DomainError("non-integral power of a negative jet");
  }
  if (base == 0.0 && (p < 0.0 || (!integral && p < 2.0))) {
    throw DomainError("power singular at zero");
  }
  if (p == 0.0) {
    return Jet<T>(1.0);
  }
  T f0 = pow(a.v0, p);
  T f1 = p == 1.0 ? T(1.0) : p * pow(a.v0, p - 1.0);
  T f2 = p == 1.0 ? T(0.0) : p * (p - 1.0) * pow(a.v0, p - 2.0);
  return detail::chain(a, std::move(f0), std::move(f1), std::move(f2));
}

// Ambiguity breaker for integer literals.
template <class T>
Jet<T> pow(const Jet<T>& a, int p) {
  return pow(a, static_cast<double>(p));
}

/// Lifts x to the line x + t v.
template <class S>
std::vector<Jet<S>> lift(const std::vector<S>& x, std::span<const double> v) {
  std::vector<Jet<S>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.emplace_back(x[i], S(i < v.size() ? v[i] : 0.0), S(0.0));
  }
  return out;
}

/// Lifts x to the line x + t e_axis.
template <class S>
std::vector<Jet<S>> lift_axis(const std::vector<S>& x, std::size_t axis) {
  std::vector<Jet<S>> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.emplace_back(x[i], S(i == axis ? 1.0 : 0.0), S(0.0));
  }
  return out;
}

/// Embeds constants one tier up (zero derivatives).
template <class S>
std::vector<Jet<S>> constant_lift(const std::vector<S>& x) {
  return std::vector<Jet<S>>(x.begin(), x.end());
}

/// (f(x), Df(x)[v], D^2 f(x)[v, v]) for a field written generically over
/// its scalar type.
template <class S = double, class F>
Jet<S> jet_eval(F&& f, const std::vector<S>& x, std::span<const double> v) {
  return std::forward<F>(f)(lift(x, v));
}

/// d^2 f / dx^i dx^j by polarisation of three directional second
/// derivatives.  The e_i + e_j seed is order independent, so the result is
/// exactly symmetric in (i, j).
template <class S = double, class F>
S mixed_partial(F&& f, const std::vector<S>& x, std::size_t i, std::size_t j) {
  const std::size_t d = x.size();
  std::vector<double> ei(d, 0.0), ej(d, 0.0), eij(d, 0.0);
  ei[i] = 1.0;
  ej[j] = 1.0;
  eij[i] += 1.0;
  eij[j] += 1.0;
  const S dij = f(lift(x, eij)).v2;
  const S dii = f(lift(x, ei)).v2;
  const S djj = f(lift(x, ej)).v2;
  return 0.5 * (dij - dii - djj);
}

template <class S = double, class F>
std::vector<S> gradient(F&& f, const std::vector<S>& x) {
  std::vector<S> g;
  g.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    g.push_back(f(lift_axis(x, k)).v1);
  }
  return g;
}

}  // namespace projflat
