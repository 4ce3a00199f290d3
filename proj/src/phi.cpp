#include "projflat/phi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "projflat/quadrature.hpp"

namespace projflat {
namespace {

constexpr std::array<std::pair<PhiFamily, std::string_view>, 10> kNames{{
    {PhiFamily::GeneralJ02, "general-j02"},
    {PhiFamily::FirstClass, "first-class"},
    {PhiFamily::SecondClass, "second-class"},
    {PhiFamily::ThirdClass, "third-class"},
    {PhiFamily::FourthQuadrature, "fourth-class-quadrature"},
    {PhiFamily::FourthClosedM2, "fourth-class-closed-m2"},
    {PhiFamily::FourthClosedM4, "fourth-class-closed-m4"},
    {PhiFamily::FifthClass, "fifth-class"},
    {PhiFamily::Randers, "randers"},
    {PhiFamily::SquareRanders, "square-randers"},
}};

void require_m(double m) {
  if (m == 0.0 || m == 1.0) {
    throw InvalidParameter("m must differ from 0 and 1");
  }
}

void require_b(double b) {
  if (!(b > 0.0)) {
    throw InvalidParameter("b must be positive");
  }
}

}  // namespace

std::string_view family_name(PhiFamily f) {
  for (const auto& [fam, name] : kNames) {
    if (fam == f) {
      return name;
    }
  }
  return "unknown";
}

PhiFamily family_from_name(std::string_view name) {
  for (const auto& [fam, n] : kNames) {
    if (n == name) {
      return fam;
    }
  }
  throw InvalidParameter("unknown phi family '" + std::string(name) + "'");
}

PhiSpec PhiSpec::general_j02(double c, double m) {
  require_m(m);
  PhiParams p;
  p.c = c;
  p.m = m;
  return {PhiFamily::GeneralJ02, p};
}

PhiSpec PhiSpec::first_class(double k) {
  PhiParams p;
  p.k = k;
  p.m = -1.0;
  return {PhiFamily::FirstClass, p};
}

PhiSpec PhiSpec::second_class(double m, double k, double a1) {
  require_m(m);
  PhiParams p;
  p.m = m;
  p.k = k;
  p.a1 = a1;
  return {PhiFamily::SecondClass, p};
}

PhiSpec PhiSpec::third_class(double m, double k) {
  require_m(m);
  PhiParams p;
  p.m = m;
  p.k = k;
  return {PhiFamily::ThirdClass, p};
}

PhiSpec PhiSpec::fourth_quadrature(double m, double k, double b) {
  require_m(m);
  require_b(b);
  if (m < 0.0) {
    // t^(m-1) is not integrable at 0.
    throw InvalidParameter("fourth-class quadrature needs m > 0");
  }
  PhiParams p;
  p.m = m;
  p.k = k;
  p.b = b;
  return {PhiFamily::FourthQuadrature, p};
}

PhiSpec PhiSpec::fourth_closed_m2(double k, double b) {
  require_b(b);
  if (k * b * b == 1.0) {
    throw InvalidParameter("closed form needs k != 1/b^2");
  }
  PhiParams p;
  p.m = 2.0;
  p.k = k;
  p.b = b;
  return {PhiFamily::FourthClosedM2, p};
}

PhiSpec PhiSpec::fourth_closed_m4(double k, double b) {
  require_b(b);
  if (k * b * b == 1.0) {
    throw InvalidParameter("closed form needs k != 1/b^2");
  }
  PhiParams p;
  p.m = 4.0;
  p.k = k;
  p.b = b;
  return {PhiFamily::FourthClosedM4, p};
}

PhiSpec PhiSpec::fifth_class(double k1, double k2, double b) {
  require_b(b);
  if (1.0 + k2 * b * b == 0.0) {
    throw InvalidParameter("fifth class needs 1 + k2 b^2 != 0");
  }
  PhiParams p;
  p.k1 = k1;
  p.k2 = k2;
  p.b = b;
  p.m = -3.0;
  return {PhiFamily::FifthClass, p};
}

PhiSpec PhiSpec::randers() { return {PhiFamily::Randers, PhiParams{}}; }

PhiSpec PhiSpec::square_randers() { return {PhiFamily::SquareRanders, PhiParams{}}; }

bool PhiSpec::singular_at_zero() const noexcept {
  return family_ != PhiFamily::Randers && family_ != PhiFamily::SquareRanders;
}

bool PhiSpec::is_fourth_class() const noexcept {
  return family_ == PhiFamily::FourthQuadrature || family_ == PhiFamily::FourthClosedM2 ||
         family_ == PhiFamily::FourthClosedM4;
}

void PhiSpec::check_fourth_window(double s, bool positive_only) const {
  const double b = p_.b;
  if (positive_only ? !(s > 0.0 && s < b) : !(std::abs(s) < b)) {
    throw DomainError("fourth-class phi evaluated outside its s-window");
  }
  if (!(p_.k * s * s < 1.0)) {
    throw DomainError("branch error: k s^2 >= 1");
  }
}

double phi_detail::fourth_integral_value(double s, double m, double k, double b) {
  // Leading behaviour near 0: t^(m-1) (c0 + c1 t^2).
  const double b3 = b * b * b;
  const double c0 = 1.0 / b3;
  const double c1 = (1.5 / (b * b) + 0.5 * k * (m - 1.0)) / b3;
  auto head = [&](double eps) {
    return c0 * std::pow(eps, m) / m + c1 * std::pow(eps, m + 2.0) / (m + 2.0);
  };
  if (s <= kQuadratureStart) {
    return head(s);
  }
  auto f = [m, k, b](double t) { return fourth_integrand(t, m, k, b); };
  return head(kQuadratureStart) + adaptive_simpson(f, kQuadratureStart, s);
}

PhiValues phi_eval(const PhiSpec& phi, double s) {
  const J1 v = phi(J1(s, 1.0, 0.0));
  return {v.v0, v.v1, v.v2};
}

double phi_fourth_class_quadrature(double m, double k, double b, double s) {
  return PhiSpec::fourth_quadrature(m, k, b)(s);
}

double ode_w51_residual(const PhiSpec& phi, double m, double k, double b, double s) {
  const PhiValues v = phi_eval(phi, s);
  const double w = b * b - s * s;
  const double lhs = (v.phi - s * v.d1 + w * v.d2) / (s * v.phi + w * v.d1);
  const double rhs = (m - 1.0) / (s * (1.0 - k * s * s));
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

double second_class_identity_residual(const PhiSpec& phi, double m, double k, double s) {
  const PhiValues v = phi_eval(phi, s);
  const double rhs = (k * s * s - m) * (v.phi - s * v.d1) / (s * s * (1.0 + k * s * s));
  return std::abs(v.d2 - rhs) / std::max(1.0, std::abs(rhs));
}

}  // namespace projflat
