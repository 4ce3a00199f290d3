#include <doctest.h>

#include <cmath>
#include <random>

#include "projflat/catalog.hpp"

using namespace projflat;

namespace {

EtaField constant_eta() {
  EtaField e;
  e.kind = EtaField::Kind::Constant;
  return e;
}

// Generalised binomial coefficient C(p, j).
double binom(double p, int j) {
  double c = 1.0;
  for (int i = 0; i < j; ++i) c *= (p - i) / (i + 1);
  return c;
}

}  // namespace

TEST_CASE("Randers-Klein by direct substitution") {
  for (int sign : {1, -1}) {
    const ABMetric M = make_randers_klein(2, {0.0, 0.0}, sign);
    const Vec<double> x{0.5, 0.0}, y{1.0, 0.0};
    CHECK(M.alpha(x, y) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(M.beta(x, y) == doctest::Approx(sign * 2.0 / 3.0).epsilon(1e-15));
    CHECK(f_eval(M, {0.0, 0.0}, y) == 1.0);
  }
  CHECK_THROWS_AS(f_eval(make_randers_klein(2, {0.0, 0.0}, 1), {0.8, 0.7}, {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(make_randers_klein(2, {0.0, 0.0}, 2), InvalidParameter);
  CHECK_THROWS_AS(make_randers_klein(3, {0.0, 0.0}, 1), InvalidParameter);
}

TEST_CASE("square-Klein lambda and reduction at the origin") {
  CHECK(square_klein_lambda({0.1, 0.0}, {0.3, 0.0}) == doctest::Approx(1.03 * 1.03 / 0.91).epsilon(1e-15));
  const ABMetric M = make_square_klein(2, {0.0, 0.0}, 1);
  CHECK(f_eval(M, {0.0, 0.0}, {0.3, -0.4}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("eta family") {
  // Constant eta and k = 0: F = (y^1)^m |y|^(1-m).
  for (double m : {-2.0, 0.5, 2.0, 3.0}) {
    const ABMetric M = make_third_class_eta(3, m, 0.0, constant_eta());
    const Vec<double> y{0.5, 0.3, -0.6};
    const double ny = std::sqrt(dot(y, y));
    CHECK(f_eval(M, {0.1, 0.2, 0.3}, y) == doctest::Approx(std::pow(0.5, m) * std::pow(ny, 1 - m)).epsilon(1e-13));
  }
  // m = -1: x-independent.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double k : {0.0, -0.5}) {
    const ABMetric M = make_third_class_eta(2, -1.0, k, EtaField{});
    for (int t = 0; t < 50; ++t) {
      const Vec<double> x{u(rng), u(rng)};
      const Vec<double> y{std::abs(u(rng)) + 0.1, u(rng)};
      CHECK(rel_residual(f_eval(M, x, y), f_eval(M, {0.0, 0.0}, y)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(make_third_class_eta(2, 1.0, 0.0, EtaField{}), InvalidParameter);
  CHECK_THROWS_AS(eta_family_geometry(2, 2.0, 50.0, EtaField{}).a(Vec<double>{0.1, 0.1}), DomainError);
  CHECK(EtaField::kind_from_name(EtaField::kind_name(EtaField::Kind::Exp)) == EtaField::Kind::Exp);
}

TEST_CASE("first-class Kropina construction") {
  const std::vector<Vec<double>> probes{{0.1, 0.2}, {-0.3, 0.4}, {0.45, -0.1}};
  for (double k : {0.0, -0.5}) {
    const RiemannData g = eta_family_geometry(2, -1.0, k, EtaField{});
    const FirstClassKropina fk = make_first_class_kropina(g, k, {}, probes);
    for (const Vec<double>& x : probes) {
      const Vec<double> y{0.7, 0.3};
      const BetaDerivatives bd = beta_apparatus(g, x, y);
      const double mu = fk.mu(x);
      const double al2 = bilinear(bd.a, y, y);
      const double be = dot(bd.b, y);
      const Vec<double> rho = fk.params.rho(x);
      // r_00 = 2k beta s_0 + mu (alpha^2 + k beta^2)
      CHECK(std::abs(bd.r00 - (2 * k * be * bd.s0 + mu * (al2 + k * be * be))) < 1e-9);
      // G_alpha = rho y - r_00 b / (2b^2) - (alpha^2 - k beta^2) s^i / (2b^2)
      const Vec<double> Ga = spray_riemann(g, x, y);
      const double rho0 = dot(rho, y);
      for (int i = 0; i < 2; ++i) {
        const double rhs =
            rho0 * y[i] - bd.r00 * bd.bup[i] / (2 * bd.b2) - (al2 - k * be * be) * bd.si[i] / (2 * bd.b2);
        CHECK(std::abs(Ga[i] - rhs) < 1e-9);
      }
      // P = rho_0 - (mu beta + s_0) / b^2 equals the extracted projective factor.
      const double P = rho0 - (mu * be + bd.s0) / bd.b2;
      CHECK(std::abs(projective_factor(fk.metric, x, y) - P) < 1e-8);
    }
  }
  // Flat-parallel data with mu = 0: rho = 0, P = 0, K = 0.
  const FirstClassKropina fp =
      make_first_class_kropina(flat_parallel({0.6, 0.2}), 0.5, [](const Vec<double>&) { return 0.0; }, probes);
  CHECK(max_abs(fp.params.rho({0.1, 0.1})) == 0.0);
  CHECK(std::abs(projective_factor(fp.metric, {0.1, 0.1}, {0.5, 0.2})) < 1e-14);
  CHECK(std::abs(flag_curvature_projflat(fp.metric, {0.1, 0.1}, {0.5, 0.2})) < 1e-12);

  // Data violating the constraints is refused.
  const RiemannData shear(
      2, [](const auto& x) { return Mat<typename std::decay_t<decltype(x)>::value_type>::identity(2); },
      [](const auto& x) {
        using T = typename std::decay_t<decltype(x)>::value_type;
        return Vec<T>{T(1.0), x[0] * x[0]};
      });
  CHECK_THROWS_AS(make_first_class_kropina(shear, 0.0, {}, probes), ConstraintViolation);
}

TEST_CASE("Kropina deformation") {
  const RiemannData g = deform_kropina(eta_family_geometry(3, -1.0, 0.0, EtaField{}));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const Vec<double> x{u(rng), u(rng), u(rng)};
    const Vec<double> y{u(rng), u(rng), u(rng)};
    const BetaDerivatives bd = beta_apparatus(g, x, y);
    CHECK(max_abs(bd.r) < 1e-9);
    CHECK(max_abs(bd.s) < 1e-9);
    CHECK(max_abs(spray_riemann(g, x, y)) < 1e-9);
    CHECK(riemann_curvature(g, x).max_abs() < 1e-7);
  }
  // Constant b: a rescaling that keeps beta parallel.
  const RiemannData c = deform_kropina(flat_parallel({0.5, 0.5}));
  const BetaDerivatives bd = beta_apparatus(c, {0.2, 0.3}, {1.0, 0.0});
  CHECK(bd.a(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(max_abs(bd.r) == 0.0);
  CHECK(max_abs(bd.s) == 0.0);
}

TEST_CASE("series solution of the fourth-class ODE") {
  const SeriesSolution s0 = series_solve_w51(2.0, 0.0, 1.0, 4);
  CHECK(s0.coeffs[0] == doctest::Approx(0.25).epsilon(1e-15));

  // m = 2: Taylor coefficients of the closed form, expanded by hand:
  // s^4: (1 + kb^2) / (4b^2), s^6: (1 + kb^2 + k^2 b^4) / (8b^4).
  for (double b : {0.7, 1.0, 1.6}) {
    for (double k : {-1.0, 0.0, 0.3}) {
      const SeriesSolution s = series_solve_w51(2.0, k, b, 4);
      const double kb2 = k * b * b;
      CHECK(std::abs(s.coeffs[0] - (1 + kb2) / (4 * b * b)) < 1e-14);
      CHECK(std::abs(s.coeffs[1] - (1 + kb2 + kb2 * kb2) / (8 * std::pow(b, 4))) < 1e-14);
    }
  }

  // k = 1/b^2: s^m (1 - s^2/b^2)^((1-m)/2), binomial coefficients.
  for (double m : {-2.5, 0.5, 3.0, 5.5}) {
    const double b = 0.9;
    const SeriesSolution s = series_solve_w51(m, 1.0 / (b * b), b, 4);
    for (int j = 1; j <= 4; ++j) {
      const double oracle = binom(0.5 * (1.0 - m), j) * std::pow(-1.0 / (b * b), j);
      CHECK(std::abs(s.coeffs[j - 1] - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
    }
  }

  // Recurrence reproduces the displayed closed forms.
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> P(1, 12), Q(1, 4), B(2, 8), K(-8, 3);
  for (int t = 0; t < 10; ++t) {
    const double m = static_cast<double>(P(rng)) / Q(rng);
    if (m == 1.0) continue;
    const double b = static_cast<double>(B(rng)) / Q(rng);
    const double k = static_cast<double>(K(rng)) / Q(rng) / (b * b);
    const SeriesSolution s = series_solve_w51(m, k, b, 4);
    const std::vector<double> c = series_closed_form_coefficients(m, k, b);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(s.coeffs[j] - c[j]) <= 1e-12 * std::max(1.0, std::abs(c[j])));
  }

  CHECK_THROWS_AS(series_solve_w51(-2.0, 0.0, 1.0, 4), InvalidParameter);
}

TEST_CASE("series agrees with the quadrature near s = 0") {
  // The quadrature profile also starts with s^m; the gap is the truncated O(s^(m+10)) tail.
  for (double m : {0.5, 3.0}) {
    const double k = -0.4, b = 1.0;
    const SeriesSolution s = series_solve_w51(m, k, b, 4);
    double prev = 0.0;
    for (double t : {0.3, 0.15, 0.075}) {
      const double gap = std::abs(phi_fourth_class_quadrature(m, k, b, t) - s.eval(t)) / std::pow(t, m);
      CHECK(gap < 1e-6);
      // Halving s divides the gap by about 2^10.
      if (prev > 0.0) CHECK(prev / gap > 500.0);
      prev = gap;
    }
  }
}

TEST_CASE("closed-form fourth-class profiles") {
  const double b = 0.8;
  const PhiSpec w = make_phi_closed_form("w088", 2.5, 0.0, b);
  for (double f : {0.2, 0.5, 0.8}) CHECK(ode_w51_residual(w, 2.5, 1.0 / (b * b), b, f * b) < 1e-8);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> us(0.01, 0.99);
  const double k = -0.6;
  const PhiSpec y88 = make_phi_closed_form("y088", 2.0, k, b);
  const PhiSpec y89 = make_phi_closed_form("y089", 4.0, k, b);
  for (int t = 0; t < 20; ++t) {
    const double s = us(rng) * b;
    CHECK(std::abs(y89(s) - y88(s) * y88(s) / std::sqrt(1 - k * s * s)) < 1e-12);
  }
  CHECK_THROWS_AS(make_phi_closed_form("y088", 2.0, 1.0 / (b * b), b), InvalidParameter);
  CHECK_THROWS_AS(make_phi_closed_form("nope", 2.0, 0.0, b), InvalidParameter);
}

TEST_CASE("tilde identifications") {
  auto check = [](double b, double k, double al, double be) {
    const TildeForms t = identify_tilde_forms(b, k, al, be);
    const double R = std::sqrt(al * al - k * be * be);
    const double S = std::sqrt(b * b * al * al - be * be);
    const double D = 1 - k * b * b;
    const double Fiii = 2 * b / D * (b * R - S);
    const double Fiv = 4 * b * b / (D * D) * (b * R - S) * (b * R - S) / R;
    CHECK(std::abs(t.F_iii - Fiii) <= 1e-12 * std::abs(Fiii) + 1e-15);
    CHECK(std::abs(t.F_iv - Fiv) <= 1e-12 * std::abs(Fiv) + 1e-15);
    CHECK(std::abs(t.randers_form - Fiii) <= 1e-12 * std::max(1.0, std::abs(Fiii)));
    CHECK(std::abs(t.square_form - Fiv) <= 1e-12 * std::max(1.0, std::abs(Fiv)));
    return t;
  };
  check(0.8, 0.0, 1.0, 0.4);
  check(0.8, -1.0, 1.0, 0.4);
  // s = b: the 1-form part vanishes.
  const TildeForms edge = check(0.8, 0.5, 1.0, 0.8);
  CHECK(edge.beta_t_iii == 0.0);
  CHECK(edge.F_iii == doctest::Approx(edge.alpha_t_iii).epsilon(1e-15));
  CHECK_THROWS_AS(identify_tilde_forms(0.8, 2.0, 1.0, 0.4), InvalidParameter);
}
