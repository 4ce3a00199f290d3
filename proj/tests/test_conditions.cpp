#include <doctest.h>

#include <cmath>
#include <random>

#include "projflat/conditions.hpp"

using namespace projflat;

namespace {

template <class V>
using Scalar = typename std::decay_t<V>::value_type;

// x in [-0.5, 0.5]^n, y with lo b <= beta/alpha <= hi b.
std::vector<Sample> samples_for(const RiemannData& g, int count, double lo, double hi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(-1.0, 1.0);
  const int n = g.dim();
  std::vector<Sample> out;
  while (static_cast<int>(out.size()) < count) {
    Sample s{Vec<double>(n), Vec<double>(n)};
    for (auto& v : s.x) v = ux(rng);
    for (auto& v : s.y) v = uy(rng);
    const Mat<double> a = g.a(s.x);
    const Vec<double> b = g.b(s.x);
    const double al = std::sqrt(bilinear(a, s.y, s.y));
    const double bn = std::sqrt(dot(b, mat_vec(inverse(a), b)));
    const double r = dot(b, s.y) / al / bn;
    if (al >= 0.1 && r >= lo && r <= hi) out.push_back(s);
  }
  return out;
}

RiemannData linear_one_form(int n) {
  return RiemannData(
      n, [n](const auto& x) { return Mat<Scalar<decltype(x)>>::identity(n); },
      [n](const auto& x) {
        using T = Scalar<decltype(x)>;
        Vec<T> b(n, T(0.0));
        b[0] = T(1.0) + 0.5 * x[0];
        b[1] = 0.3 * x[0];
        return b;
      });
}

// The eta geometry with beta scaled by 1 + 0.1 x^2.
RiemannData scaled_beta(const RiemannData& g) {
  return RiemannData(
      g.dim(), [g](const auto& x) { return g.a(x); },
      [g](const auto& x) {
        auto b = g.b(x);
        for (auto& v : b) v = v * (1.0 + 0.1 * x[1]);
        return b;
      });
}

}  // namespace

TEST_CASE("flat-parallel checker") {
  const RiemannData fp = flat_parallel({0.6, 0.3, -0.2});
  const CaseResiduals ok = check_flat_parallel(fp, samples_for(fp, 20, 0.1, 1.0, 1));
  CHECK(ok.pass());
  CHECK(ok.residual("r_ij") == 0.0);
  CHECK(ok.residual("s_ij") == 0.0);
  CHECK(ok.residual("R") == 0.0);

  const RiemannData eta = eta_family_geometry(2, 2.0, 0.0, EtaField{});
  const CaseResiduals bad = check_flat_parallel(eta, samples_for(eta, 20, 0.1, 1.0, 2));
  CHECK_FALSE(bad.pass());
  CHECK(bad.residual("R") >= 1e-3);

  const RiemannData shear(
      2, [](const auto& x) { return Mat<Scalar<decltype(x)>>::identity(2); },
      [](const auto& x) {
        using T = Scalar<decltype(x)>;
        return Vec<T>{x[1], T(0.0)};
      });
  const std::vector<Sample> pts{{{0.1, 0.2}, {1.0, 1.0}}};
  const CaseResiduals sh = check_flat_parallel(shear, pts);
  CHECK(sh.residual("s_ij") == doctest::Approx(0.5));
  CHECK_FALSE(sh.pass());
  CHECK_THROWS_AS(sh.residual("nope"), std::out_of_range);
}

TEST_CASE("case (i)") {
  const RiemannData fp = flat_parallel({0.6, 0.3});
  const auto fps = samples_for(fp, 20, 0.1, 1.0, 3);
  const CaseResiduals z = check_case_i(fp, 0.5, ConditionParams::zero(2), fps);
  CHECK(z.pass());
  CHECK(z.residual("G_alpha") == 0.0);

  for (double k : {0.0, -0.5}) {
    const RiemannData g = eta_family_geometry(2, -1.0, k, EtaField{});
    const auto smp = samples_for(g, 30, 0.1, 1.0, 4);
    const ConditionParams p = estimate_params(Case::I, g, {-1.0, k, 0.0, 0.0, 0.0});
    const CaseResiduals r = check_case_i(g, k, p, smp);
    CHECK(r.pass());
    CHECK(r.incidents.empty());
    CHECK(r.has("K"));
    CHECK(r.residual("K") < 1e-5);
    CHECK(r.residual("G_yyy") < 1e-8);
    // rho + 0.1 dx^1 breaks the G_alpha relation.
    const CaseResiduals w = check_case_i(g, k, shift_rho(p, 0, 0.1), smp);
    CHECK_FALSE(w.pass());
    CHECK(w.residual("G_alpha") > 1e-3);
  }
}

TEST_CASE("case (ii)") {
  for (int n : {2, 3}) {
    Vec<double> b{0.6, 0.3, -0.2};
    b.resize(n);
    const RiemannData fp = flat_parallel(b);
    const CaseResiduals r = check_case_ii(fp, 2.5, 0.3, 0.0, ConditionParams::zero(n), samples_for(fp, 20, 0.1, 1.0, 5));
    CHECK(r.pass());
  }
  const RiemannData lin = linear_one_form(2);
  const ConditionParams p = estimate_params(Case::II, lin, {2.5, 0.3, 0.0, 0.0, 0.0});
  CHECK_FALSE(check_case_ii(lin, 2.5, 0.3, 0.0, p, samples_for(lin, 20, 0.1, 1.0, 6)).pass());
}

TEST_CASE("case (iii)") {
  for (double m : {-2.0, 0.5, 2.0, 3.0}) {
    const RiemannData g = eta_family_geometry(2, m, 0.0, EtaField{});
    // s^3 stops being strongly convex at s = sqrt(3/4) b; stay clear of it.
    const auto smp = samples_for(g, 30, 0.3, 0.85, 7);
    const ConditionParams p = estimate_params(Case::III, g, {m, 0.0, 0.0, 0.0, 0.0});
    const CaseResiduals r = check_case_iii(g, m, 0.0, p, smp);
    CHECK(r.pass());
    CHECK(r.residual("P") < 1e-8);
    CHECK(r.residual("K") < 1e-5);

    // beta scaled by 1 + 0.1 x^2 with the old parameters.
    const RiemannData h = scaled_beta(g);
    const CaseResiduals bad = check_case_iii(h, m, 0.0, p, samples_for(h, 30, 0.3, 0.85, 7));
    CHECK_FALSE(bad.pass());
  }
  const RiemannData fp = flat_parallel({0.6, 0.3});
  CHECK(check_case_iii(fp, 2.0, -0.5, ConditionParams::zero(2), samples_for(fp, 20, 0.1, 1.0, 8)).pass());
}

TEST_CASE("case (iv)") {
  const RiemannData fp = flat_parallel({0.6, 0.3});
  const auto smp = samples_for(fp, 20, 0.1, 0.9, 9);
  const CaseResiduals r = check_case_iv(fp, 2.0, 0.3, ConditionParams::zero(2), smp);
  CHECK(r.pass());
  CHECK(r.residual("db2") < 1e-8);

  const RiemannData lin = linear_one_form(2);
  const ConditionParams p = estimate_params(Case::IV, lin, {2.0, 0.3, 0.0, 0.0, 0.0});
  CHECK_FALSE(check_case_iv(lin, 2.0, 0.3, p, samples_for(lin, 20, 0.1, 0.9, 10)).pass());

  const RiemannData fp3 = flat_parallel({0.6, 0.3, 0.1});
  CHECK_THROWS_AS(check_case_iv(fp3, 2.0, 0.3, ConditionParams::zero(3), samples_for(fp3, 5, 0.1, 0.9, 11)),
                  InvalidParameter);
}

TEST_CASE("case (v)") {
  const RiemannData fp = flat_parallel({0.6, 0.3});
  const auto smp = samples_for(fp, 20, 0.1, 1.0, 12);
  const CaseResiduals r = check_case_v(fp, 1.0, 0.5, ConditionParams::zero(2), smp);
  CHECK(r.pass());
  CHECK(r.residual("s_j") == 0.0);
  CHECK(r.residual("tau") == 0.0);

  CHECK_THROWS_AS(check_case_v(fp, 0.25, 0.5, ConditionParams::zero(2), smp), ReducibleCaseError);

  const RiemannData lin = linear_one_form(2);
  const ConditionParams p = estimate_params(Case::V, lin, {0.0, 0.0, 0.0, 1.0, 0.5});
  CHECK_FALSE(check_case_v(lin, 1.0, 0.5, p, samples_for(lin, 20, 0.1, 1.0, 13)).pass());

  const RiemannData fp3 = flat_parallel({0.6, 0.3, 0.1});
  CHECK_THROWS_AS(check_case_v(fp3, 1.0, 0.5, ConditionParams::zero(3), samples_for(fp3, 5, 0.1, 1.0, 14)),
                  InvalidParameter);
}

TEST_CASE("every single-equation perturbation is detected") {
  const RiemannData g = eta_family_geometry(3, 2.0, 0.0, EtaField{});
  const auto smp = samples_for(g, 20, 0.3, 0.85, 15);
  const ConditionParams p = estimate_params(Case::III, g, {2.0, 0.0, 0.0, 0.0, 0.0});
  const CaseResiduals base = check_case_iii(g, 2.0, 0.0, p, smp);
  REQUIRE(base.pass());
  for (const auto& e : base.entries) {
    if (e.tag == "projective") continue;
    const CaseResiduals bad = check_case_iii(g, 2.0, 0.0, p, smp, {}, Perturbation{e.tag, 0.1});
    CAPTURE(e.tag);
    CHECK(bad.residual(e.tag) > 1e-3);
  }
}

TEST_CASE("empty or mismatched samples are rejected") {
  const RiemannData fp = flat_parallel({0.6, 0.3});
  CHECK_THROWS_AS(check_case_i(fp, 0.0, ConditionParams::zero(2), {}), InvalidParameter);
  const std::vector<Sample> wrong{{{0.1, 0.2, 0.3}, {1.0, 0.0, 0.0}}};
  CHECK_THROWS_AS(check_flat_parallel(fp, wrong), InvalidParameter);
}
