#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "projflat/harness.hpp"

using namespace projflat;
using nlohmann::json;

namespace {

SuiteConfig config(const std::string& suite, int samples = 30) {
  SuiteConfig c;
  c.suite = suite;
  c.samples = samples;
  return c;
}

const CheckResult& find(const SuiteReport& r, const std::string& prefix) {
  for (const auto& c : r.checks) {
    if (c.name.rfind(prefix, 0) == 0) return c;
  }
  throw std::runtime_error("no check " + prefix);
}

}  // namespace

TEST_CASE("config parsing is strict") {
  const json good = json::parse(R"({"suite": "mkropina-eta", "dim": 3, "samples": 12, "seed": 9,
      "tol": {"curvature": 1e-6}, "m": [2, 3], "k": 0, "eta": {"kind": "sine", "A": 0.2}})");
  const SuiteConfig c = parse_config(good);
  CHECK(c.suite == "mkropina-eta");
  CHECK(c.dim == 3);
  CHECK(c.samples == 12);
  CHECK(c.seed == 9);
  CHECK(c.tolerance("curvature") == 1e-6);
  CHECK(c.tolerance("spray") == 1e-7);
  CHECK(c.m == std::vector<double>{2.0, 3.0});
  CHECK(c.k == std::vector<double>{0.0});
  CHECK(c.eta.kind == EtaField::Kind::Sine);
  CHECK(c.eta.A == 0.2);

  CHECK_THROWS_AS(parse_config(json::parse(R"({"colour": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"dim": "two"})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"tol": {"bogus": 1}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"sign": [2]})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"eta": {"kind": "nope"}})")), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse("[1, 2]")), ConfigError);

  // Echo round-trips.
  const SuiteConfig back = parse_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("tolerance overrides and validation") {
  SuiteConfig c = config("flat-parallel");
  apply_tol_override(c, "curvature=2.5e-6");
  CHECK(c.tolerance("curvature") == 2.5e-6);
  CHECK_THROWS_AS(apply_tol_override(c, "curvature"), ConfigError);
  CHECK_THROWS_AS(apply_tol_override(c, "bogus=1e-3"), ConfigError);
  CHECK_THROWS_AS(apply_tol_override(c, "spray=1e-3x"), ConfigError);

  CHECK_NOTHROW(validate_config(c));
  SuiteConfig bad = c;
  bad.samples = 0;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = c;
  bad.dim = 9;
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = c;
  bad.suite = "nope";
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
  bad = c;
  bad.m = {1.0};
  CHECK_THROWS_AS(validate_config(bad), ConfigError);
}

TEST_CASE("sampling") {
  SuiteConfig c = config("mkropina-eta", 100);
  c.box = std::make_pair(-0.3, 0.4);
  const ABMetric M = make_third_class_eta(2, -1.0, 0.0, EtaField{});
  const auto a = sample_domain(c, M, SamplePolicy::PositiveSingular);
  const auto b = sample_domain(c, M, SamplePolicy::PositiveSingular);
  REQUIRE(a.size() == 100);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
    for (double v : a[i].x) CHECK((v >= -0.3 && v <= 0.4));
    CHECK(std::sqrt(dot(a[i].y, a[i].y)) >= 0.1);
    const BetaDerivatives bd = beta_apparatus(M.geom(), a[i].x, a[i].y);
    const double s = dot(bd.b, a[i].y) / std::sqrt(bilinear(bd.a, a[i].y, a[i].y));
    CHECK(s >= 0.1 * std::sqrt(bd.b2));
    const PhiValues v = phi_eval(M.phi(), s);
    CHECK(v.phi - s * v.d1 + (bd.b2 - s * s) * v.d2 >= kRegularityMargin * v.phi);
  }
  // Another stream gives other points.
  CHECK(sample_domain(c, M, SamplePolicy::PositiveSingular, 1)[0].x != a[0].x);

  // Fourth-class window.
  const ABMetric fp(flat_parallel({0.6, 0.3}), PhiSpec::fourth_closed_m2(0.3, std::hypot(0.6, 0.3)));
  for (const auto& s : sample_domain(c, fp, SamplePolicy::FourthClass)) {
    const double r = dot(Vec<double>{0.6, 0.3}, s.y) / std::sqrt(dot(s.y, s.y)) / std::hypot(0.6, 0.3);
    CHECK((r >= 0.05 && r <= 0.95));
  }

  // A box outside the unit ball admits nothing.
  SuiteConfig outside = config("randers-klein", 5);
  outside.box = std::make_pair(1.5, 2.0);
  CHECK_THROWS_AS(sample_domain(outside, make_randers_klein(2, {0.0, 0.0}, 1), SamplePolicy::Regular), ConfigError);
}

TEST_CASE("flat-parallel suite passes at round-off") {
  const SuiteReport r = run_suite(config("flat-parallel"));
  CHECK(r.pass);
  for (const auto& c : r.checks) {
    CHECK(c.max_residual < 1e-12);
    CHECK(c.samples > 0);
  }
}

TEST_CASE("randers-klein suite reports K = -1/4") {
  SuiteConfig c = config("randers-klein", 20);
  const SuiteReport r = run_suite(c);
  CHECK(r.pass);
  const CheckResult& k = find(r, "K=-1/4");
  CHECK(k.mean_residual < 1e-5);
  CHECK(k.max_residual < 1e-5);
  CHECK(k.tol_class == "curvature");

  c.box = std::make_pair(-1.2, 1.2);
  CHECK_THROWS_AS(run_suite(c), ConfigError);
}

TEST_CASE("mkropina-eta: m = -1 is x-independent") {
  SuiteConfig c = config("mkropina-eta", 20);
  c.m = {-1.0};
  const SuiteReport r = run_suite(c);
  CHECK(r.pass);
  CHECK(find(r, "x-independence").max_residual < 1e-10);
  CHECK(find(r, "alpha-not-flat").bound == Bound::Lower);
}

TEST_CASE("kropina-deform rejects k != 0") {
  SuiteConfig c = config("kropina-deform", 10);
  c.k = {-0.5};
  CHECK_THROWS_AS(run_suite(c), ConfigError);
}

TEST_CASE("failing checks are reported, not thrown") {
  SuiteConfig c = config("square-klein", 10);
  c.tol["curvature"] = 1e-30;
  SuiteReport r;
  CHECK_NOTHROW(r = run_suite(c));
  CHECK_FALSE(r.pass);
  CHECK_FALSE(find(r, "K=0").pass);
}

TEST_CASE("reports") {
  SuiteReport empty;
  empty.suite = "none";
  const json je = report_to_json(empty);
  CHECK(je["checks"].is_array());
  CHECK(je["checks"].empty());
  CHECK(je["schema_version"] == kSchemaVersion);

  SuiteConfig c = config("conditions", 10);
  const SuiteReport r = run_suite(c);
  const json j = json::parse(emit_report(r, ReportFormat::Json));
  for (const char* key : {"schema_version", "suite", "config", "checks", "pass", "runtime_ms"}) CHECK(j.contains(key));
  for (const auto& chk : j["checks"]) {
    for (const char* key : {"name", "eq", "max_residual", "mean_residual", "pass"}) CHECK(chk.contains(key));
  }
  CHECK(report_to_json(report_from_json(j)) == j);

  const std::string text = emit_report(r, ReportFormat::Text);
  CHECK(text.find("PASS") != std::string::npos);
  CHECK(text.find("second-class identity") != std::string::npos);
}

TEST_CASE("same config and seed give identical reports") {
  for (const char* s : {"mkropina-eta", "ode-series", "tilde-forms"}) {
    SuiteConfig c = config(s, 15);
    c.seed = 42;
    json a = report_to_json(run_suite(c));
    json b = report_to_json(run_suite(c));
    a.erase("runtime_ms");
    b.erase("runtime_ms");
    CHECK(a.dump() == b.dump());
  }
}

TEST_CASE("suite registry") {
  const auto& suites = registered_suites();
  CHECK(suites.size() == 8);
  for (const auto& s : suites) {
    CHECK(suite_info(s.id).id == s.id);
    CHECK_FALSE(s.explain.empty());
  }
  CHECK_THROWS_AS(suite_info("nope"), ConfigError);
}
