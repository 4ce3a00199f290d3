#include <doctest.h>

#include <cmath>
#include <random>

#include "projflat/abmetric.hpp"
#include "projflat/catalog.hpp"

using namespace projflat;

namespace {

Vec<double> scaled(Vec<double> v, double l) {
  for (auto& x : v) x *= l;
  return v;
}

// Random (x, y) in the box with F defined and s >= 0.1 b.
std::vector<std::pair<Vec<double>, Vec<double>>> draws(const ABMetric& M, double box, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-box, box), uy(-1.0, 1.0);
  std::vector<std::pair<Vec<double>, Vec<double>>> out;
  const int n = M.dim();
  while (static_cast<int>(out.size()) < count) {
    Vec<double> x(n), y(n);
    for (auto& v : x) v = ux(rng);
    for (auto& v : y) v = uy(rng);
    const BetaDerivatives bd = beta_apparatus(M.geom(), x, y);
    const double al = std::sqrt(bilinear(bd.a, y, y));
    if (al < 0.1 || dot(bd.b, y) / al < 0.1 * std::sqrt(bd.b2)) continue;
    out.emplace_back(x, y);
  }
  return out;
}

}  // namespace

TEST_CASE("F at hand-checked points") {
  EtaField one;
  one.kind = EtaField::Kind::Constant;
  const ABMetric mk = make_third_class_eta(2, 2.0, 0.0, one);
  CHECK(f_eval(mk, {0.3, 0.1}, {3.0, 4.0}) == doctest::Approx(1.8).epsilon(1e-14));
  for (int sign : {1, -1}) {
    const ABMetric r = make_randers_klein(2, {0.0, 0.0}, sign);
    CHECK(f_eval(r, {0.0, 0.0}, {1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  }
  // m = -1 is |y|^2 / y^1 whatever eta does.
  const ABMetric kr = make_third_class_eta(2, -1.0, 0.0, EtaField{});
  CHECK(f_eval(kr, {0.4, -0.2}, {0.6, 0.8}) == doctest::Approx(1.0 / 0.6).epsilon(1e-14));
}

TEST_CASE("fundamental tensor") {
  const ABMetric riem(flat_parallel({0.0, 0.0, 0.0}), PhiSpec::randers());
  const Mat<double> g = fundamental_tensor(riem, Vec<double>{0.1, 0.2, 0.3}, Vec<double>{0.3, -0.4, 0.5});
  CHECK(rel_residual(g, Mat<double>::identity(3)) < 1e-15);

  // Kropina alpha^2/beta: oracle is central differences of F^2 / 2.
  const ABMetric kropina(flat_parallel({1.0, 0.0}), PhiSpec::first_class(0.0));
  const Vec<double> x{0.0, 0.0};
  const Vec<double> y{1.0, 1.0};
  const Mat<double> gj = fundamental_tensor(kropina, x, y);
  auto half_f2 = [&](double a, double b) {
    const double f = f_eval(kropina, x, {a, b});
    return 0.5 * f * f;
  };
  const double h = 1e-4;
  Mat<double> fd(2);
  fd(0, 0) = (half_f2(1 + h, 1) - 2 * half_f2(1, 1) + half_f2(1 - h, 1)) / (h * h);
  fd(1, 1) = (half_f2(1, 1 + h) - 2 * half_f2(1, 1) + half_f2(1, 1 - h)) / (h * h);
  fd(0, 1) = (half_f2(1 + h, 1 + h) - half_f2(1 + h, 1 - h) - half_f2(1 - h, 1 + h) + half_f2(1 - h, 1 - h)) /
             (4 * h * h);
  fd(1, 0) = fd(0, 1);
  CHECK(rel_residual(gj, fd) < 1e-6);
  // Hand value: F^2 = y1^2 + 2 y2^2 + y2^4 / y1^2.
  CHECK(gj(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(gj(1, 1) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(gj(0, 1) == doctest::Approx(-4.0).epsilon(1e-14));
}

TEST_CASE("Euler identity and homogeneity over the catalogue") {
  const std::vector<ABMetric> metrics{
      make_randers_klein(3, {0.1, 0.0, 0.0}, 1),
      make_square_klein(2, {0.0, 0.1}, -1),
      make_third_class_eta(3, 2.0, -0.5, EtaField{}),
      make_third_class_eta(2, -1.0, 0.0, EtaField{}),
      make_third_class_eta(2, 0.5, 0.0, EtaField{}),
  };
  for (const ABMetric& M : metrics) {
    for (const auto& [x, y] : draws(M, 0.4, 8, 21)) {
      const double F = f_eval(M, x, y);
      const Mat<double> g = fundamental_tensor(M, x, y);
      CHECK(std::abs(bilinear(g, y, y) - F * F) <= 1e-10 * F * F);
      const Vec<double> G = spray_generic(M, x, y);
      const double K = flag_curvature_projflat(M, x, y);
      for (double l : {0.5, 2.0}) {
        CHECK(std::abs(f_eval(M, x, scaled(y, l)) - l * F) <= 1e-10 * l * F);
        CHECK(rel_residual(spray_generic(M, x, scaled(y, l)), scaled(G, l * l)) < 1e-9);
        CHECK(std::abs(flag_curvature_projflat(M, x, scaled(y, l)) - K) < 1e-8);
      }
    }
  }
}

TEST_CASE("generic and structured sprays agree") {
  const std::vector<ABMetric> metrics{
      make_randers_klein(2, {0.0, 0.0}, 1),   make_randers_klein(3, {0.1, 0.0, 0.0}, -1),
      make_square_klein(3, {0.1, 0.0, 0.0}, 1), make_third_class_eta(2, 3.0, -0.5, EtaField{}),
      make_third_class_eta(3, -2.0, 0.0, EtaField{}),
  };
  for (const ABMetric& M : metrics) {
    for (const auto& [x, y] : draws(M, 0.45, 10, 4)) {
      CHECK(rel_residual(spray_generic(M, x, y), spray_structured(M, x, y)) < 1e-7);
    }
  }
}

TEST_CASE("structured coefficient identities") {
  const PhiSpec phi = PhiSpec::third_class(2.5, -0.3);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> us(0.1, 0.9);
  for (int t = 0; t < 20; ++t) {
    const double s = us(rng);
    const auto c = structured_coefficients(phi, s, 1.0);
    CHECK(std::abs(2 * c.Delta * c.Theta - (c.Q - s * c.dQ)) < 1e-12);
    CHECK(std::abs(2 * c.Delta * c.Psi - c.dQ) < 1e-12);
    const PhiValues v = phi_eval(phi, s);
    CHECK(c.Q == doctest::Approx(v.d1 / (v.phi - s * v.d1)).epsilon(1e-14));
  }
}

TEST_CASE("Randers-Klein: projective factor and K = -1/4") {
  for (int sign : {1, -1}) {
    const ABMetric M = make_randers_klein(2, {0.0, 0.0}, sign);
    for (const auto& [x, y] : draws(M, 0.5, 10, 2)) {
      const SprayResult sr = spray_result(spray_generic(M, x, y), y);
      CHECK(sr.antisym_residual < 1e-8);
      // Oracle: P = F_{x^k} y^k / (2F), the x-derivative taken along y by a jet.
      const J1 Fx = M.F(lift(x, y), constant_lift(y));
      CHECK(std::abs(projective_factor(M, x, y) - Fx.v1 / (2 * Fx.v0)) < 1e-7);
      CHECK(std::abs(flag_curvature_projflat(M, x, y) + 0.25) < 1e-5);
    }
  }
}

TEST_CASE("square-Klein and Minkowski have K = 0") {
  const ABMetric sq = make_square_klein(2, {0.0, 0.0}, 1);
  CHECK(f_eval(sq, {0.0, 0.0}, {0.6, 0.8}) == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& [x, y] : draws(sq, 0.5, 10, 6)) CHECK(std::abs(flag_curvature_projflat(sq, x, y)) < 1e-5);

  EtaField one;
  one.kind = EtaField::Kind::Constant;
  const ABMetric mink = make_third_class_eta(2, 3.0, 0.0, one);
  const Vec<double> x{0.2, 0.1}, y{0.7, 0.2};
  CHECK(max_abs(spray_generic(mink, x, y)) < 1e-14);
  CHECK(std::abs(projective_factor(mink, x, y)) < 1e-14);
  CHECK(std::abs(flag_curvature_projflat(mink, x, y)) < 1e-12);
}

TEST_CASE("flat-parallel data: G = G_alpha = 0") {
  const ABMetric M(flat_parallel({0.6, 0.3}), PhiSpec::fifth_class(1.0, 0.5, std::hypot(0.6, 0.3)));
  const Vec<double> x{0.4, -0.3}, y{0.8, 0.5};
  CHECK(max_abs(spray_structured(M, x, y)) == 0.0);
  CHECK(max_abs(spray_generic(M, x, y)) < 1e-14);
  CHECK(std::abs(flag_curvature_projflat(M, x, y)) < 1e-12);
}

TEST_CASE("third y-derivatives of the spray") {
  // Berwald: the eta family.
  const ABMetric eta = make_third_class_eta(2, 2.0, 0.0, EtaField{});
  for (const auto& [x, y] : draws(eta, 0.5, 5, 1)) CHECK(spray_cubic_residual(eta, x, y) < 1e-8);
  // Not Berwald: Funk-type Randers.
  const ABMetric r = make_randers_klein(2, {0.0, 0.0}, 1);
  CHECK(spray_cubic_residual(r, {0.3, 0.2}, {0.5, 0.7}) > 1e-3);
}

TEST_CASE("literal Klein 1-form with a != 0 is not projectively flat") {
  const ABMetric M = make_randers_klein(2, {0.1, 0.0}, 1, KleinOneForm::Literal);
  const Vec<double> x{0.3, -0.2}, y{0.4, 0.9};
  CHECK(spray_result(spray_generic(M, x, y), y).antisym_residual > 1e-4);
  CHECK_THROWS_AS(projective_factor(M, x, y), NotProjectivelyFlatError);
  // At a = 0 the two forms coincide.
  const ABMetric L = make_randers_klein(2, {0.0, 0.0}, 1, KleinOneForm::Literal);
  const ABMetric C = make_randers_klein(2, {0.0, 0.0}, 1);
  CHECK(f_eval(L, x, y) == f_eval(C, x, y));
}

TEST_CASE("singular locus surfaces as DomainError") {
  const ABMetric kropina(flat_parallel({1.0, 0.0}), PhiSpec::first_class(0.0));
  CHECK_THROWS_AS(f_eval(kropina, {0.0, 0.0}, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(f_eval(kropina, {0.0, 0.0}, {0.0, 0.0}), DomainError);
}
