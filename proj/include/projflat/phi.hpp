#pragma once

// The catalogue of phi(s) profiles an (alpha, beta)-metric F = alpha phi(beta/alpha)
// can carry, evaluable at every jet tier.

#include <cmath>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "projflat/errors.hpp"
#include "projflat/jet.hpp"

namespace projflat {

enum class PhiFamily {
  GeneralJ02,        // c s + s^m
  FirstClass,        // k s + 1/s
  SecondClass,       // a1 s + s^m (1 + k s^2)^((1-m)/2)
  ThirdClass,        // s^m (1 + k s^2)^((1-m)/2)
  FourthQuadrature,  // m b^2 sqrt(b^2 - s^2) int_0^s ...
  FourthClosedM2,    // 2b/(1-kb^2) {b sqrt(1-ks^2) - sqrt(b^2-s^2)}
  FourthClosedM4,    // 4b^2/(1-kb^2)^2 {..}^2 / sqrt(1-ks^2)
  FifthClass,        // k1 s + 2 k2 / s + 1 / s^3
  Randers,           // 1 + s
  SquareRanders,     // (1 + s)^2
};

struct PhiParams {
  double m = 2.0;
  double k = 0.0;
  double c = 0.0;
  double a1 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double b = 1.0;
};

struct PhiValues {
  double phi = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

std::string_view family_name(PhiFamily f);
PhiFamily family_from_name(std::string_view name);

namespace phi_detail {

template <class T>
T power(const T& x, double p) {
  if constexpr (std::is_same_v<T, double>) {
    const bool integral = std::floor(p) == p;
    if (x < 0.0 && !integral) {
      throw DomainError("non-integral power of a negative number");
    }
    if (x == 0.0 && p < 0.0) {
      throw DomainError("negative power of zero");
    }
    return std::pow(x, p);
  } else {
    return pow(x, p);
  }
}

template <class T>
T radical(const T& x, const char* what) {
  if (value_of(x) < 0.0) {
    throw DomainError(std::string("branch error: negative radicand in ") + what);
  }
  return sqrt(x);
}

template <class T>
T reciprocal(const T& x) {
  if (value_of(x) == 0.0) {
    throw DomainError("phi is singular at s = 0");
  }
  return 1.0 / x;
}

// Integrand of the fourth-class quadrature:
// (b^2 - t^2)^(-3/2) (t / sqrt(1 - k t^2))^(m-1).
template <class T>
T fourth_integrand(const T& t, double m, double k, double b) {
  return power(T(b * b) - t * t, -1.5) * power(t, m - 1.0) * power(T(1.0) - k * t * t, -0.5 * (m - 1.0));
}

double fourth_integral_value(double s, double m, double k, double b);

// int_0^s of the integrand, lifted to jets through I' = integrand.
template <class T>
T fourth_integral(const T& s, double m, double k, double b) {
  if constexpr (std::is_same_v<T, double>) {
    return fourth_integral_value(s, m, k, b);
  } else {
    using U = typename T::value_type;
    U i0 = fourth_integral<U>(s.v0, m, k, b);
    const Jet<U> f = fourth_integrand(Jet<U>(s.v0, U(1.0), U(0.0)), m, k, b);
    U i1 = f.v0 * s.v1;
    U i2 = f.v1 * (s.v1 * s.v1) + f.v0 * s.v2;
    return T(std::move(i0), std::move(i1), std::move(i2));
  }
}

}  // namespace phi_detail

/// Left end of the quadrature interval; [0, eps] is integrated from the
/// leading two terms of the integrand's expansion at t = 0.
inline constexpr double kQuadratureStart = 1e-8;

/// A tagged member of the phi catalogue with its parameters.
class PhiSpec {
 public:
  static PhiSpec general_j02(double c, double m);
  static PhiSpec first_class(double k);
  static PhiSpec second_class(double m, double k, double a1);
  static PhiSpec third_class(double m, double k);
  static PhiSpec fourth_quadrature(double m, double k, double b);
  static PhiSpec fourth_closed_m2(double k, double b);
  static PhiSpec fourth_closed_m4(double k, double b);
  static PhiSpec fifth_class(double k1, double k2, double b);
  static PhiSpec randers();
  static PhiSpec square_randers();

  PhiFamily family() const noexcept { return family_; }
  const PhiParams& params() const noexcept { return p_; }
  std::string name() const { return std::string(family_name(family_)); }

  /// True when phi(0) is not a positive finite number (F singular or
  /// degenerate on beta = 0).
  bool singular_at_zero() const noexcept;
  bool is_fourth_class() const noexcept;

  template <class T>
  T operator()(const T& s) const {
    using phi_detail::power;
    using phi_detail::radical;
    using phi_detail::reciprocal;
    const auto& p = p_;
    switch (family_) {
      case PhiFamily::GeneralJ02:
        return p.c * s + power(s, p.m);
      case PhiFamily::FirstClass:
        return p.k * s + reciprocal(s);
      case PhiFamily::SecondClass:
        return p.a1 * s + power(s, p.m) * power(T(1.0) + p.k * s * s, 0.5 * (1.0 - p.m));
      case PhiFamily::ThirdClass: {
        const T base = T(1.0) + p.k * s * s;
        if (value_of(base) <= 0.0) {
          throw DomainError("branch error: 1 + k s^2 <= 0");
        }
        return power(s, p.m) * power(base, 0.5 * (1.0 - p.m));
      }
      case PhiFamily::FourthQuadrature: {
        check_fourth_window(value_of(s), true);
        const double b2 = p.b * p.b;
        return p.m * b2 * radical(T(b2) - s * s, "b^2 - s^2") *
               phi_detail::fourth_integral(s, p.m, p.k, p.b);
      }
      case PhiFamily::FourthClosedM2: {
        check_fourth_window(value_of(s), false);
        const double b = p.b;
        const double scale = 2.0 * b / (1.0 - p.k * b * b);
        return scale * (b * radical(T(1.0) - p.k * s * s, "1 - k s^2") -
                        radical(T(b * b) - s * s, "b^2 - s^2"));
      }
      case PhiFamily::FourthClosedM4: {
        check_fourth_window(value_of(s), false);
        const double b = p.b;
        const double d = 1.0 - p.k * b * b;
        const T root = radical(T(1.0) - p.k * s * s, "1 - k s^2");
        const T inner = b * root - radical(T(b * b) - s * s, "b^2 - s^2");
        return (4.0 * b * b / (d * d)) * inner * inner / root;
      }
      case PhiFamily::FifthClass: {
        const T inv = reciprocal(s);
        return p.k1 * s + 2.0 * p.k2 * inv + inv * inv * inv;
      }
      case PhiFamily::Randers:
        return T(1.0) + s;
      case PhiFamily::SquareRanders:
        return (T(1.0) + s) * (T(1.0) + s);
    }
    throw InvalidParameter("unknown phi family");
  }

 private:
  PhiSpec(PhiFamily f, PhiParams p) : family_(f), p_(p) {}
  void check_fourth_window(double s, bool positive_only) const;

  PhiFamily family_;
  PhiParams p_;
};

/// (phi, phi', phi'') at s.
PhiValues phi_eval(const PhiSpec& phi, double s);

/// phi(s) from the fourth-class quadrature for explicit (m, k, b).
double phi_fourth_class_quadrature(double m, double k, double b, double s);

/// Relative mismatch of the fourth-class ODE
/// (phi - s phi' + (b^2-s^2) phi'') / (s phi + (b^2-s^2) phi') = (m-1) / (s (1 - k s^2)).
double ode_w51_residual(const PhiSpec& phi, double m, double k, double b, double s);

/// Relative mismatch of phi'' = (k s^2 - m)(phi - s phi') / (s^2 (1 + k s^2)).
double second_class_identity_residual(const PhiSpec& phi, double m, double k, double s);

}  // namespace projflat
