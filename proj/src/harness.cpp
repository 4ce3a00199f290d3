#include "projflat/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

namespace projflat {

using nlohmann::json;

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"identity", 1e-12}, {"algebraic", 1e-10}, {"second_order", 1e-9}, {"derivative", 1e-8},
      {"spray", 1e-7},     {"ode", 1e-6},        {"curvature", 1e-5},    {"nonflat", 1e-3},
      {"detect", 1e-3},
  };
  return t;
}

double SuiteConfig::tolerance(const std::string& cls) const {
  if (auto it = tol.find(cls); it != tol.end()) {
    return it->second;
  }
  return default_tolerances().at(cls);
}

// ---------------------------------------------------------------- config

namespace {

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::vector<double> number_list(const json& j, const char* key) {
  if (j.is_number()) {
    return {j.get<double>()};
  }
  if (!j.is_array()) {
    throw ConfigError(std::string("config key '") + key + "' must be a number or a list of numbers");
  }
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw ConfigError(std::string("config key '") + key + "' must contain numbers only");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

SuiteConfig parse_config(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("config must be a JSON object");
  }
  static const std::set<std::string> known{"suite", "dim", "samples", "seed", "tol", "box", "m", "k",
                                           "a_vec", "sign", "eta", "draws", "k1", "k2"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  SuiteConfig c;
  if (j.contains("suite")) c.suite = get_as<std::string>(j["suite"], "suite");
  if (j.contains("dim")) c.dim = get_as<int>(j["dim"], "dim");
  if (j.contains("samples")) c.samples = get_as<int>(j["samples"], "samples");
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("tol")) {
    if (!j["tol"].is_object()) {
      throw ConfigError("config key 'tol' must be an object of class: value");
    }
    for (const auto& [cls, v] : j["tol"].items()) {
      if (!default_tolerances().count(cls)) {
        throw ConfigError("unknown tolerance class '" + cls + "'");
      }
      c.tol[cls] = get_as<double>(v, "tol");
    }
  }
  if (j.contains("box")) {
    const auto b = number_list(j["box"], "box");
    if (b.size() != 2) {
      throw ConfigError("config key 'box' must be [lo, hi]");
    }
    c.box = std::make_pair(b[0], b[1]);
  }
  if (j.contains("m")) c.m = number_list(j["m"], "m");
  if (j.contains("k")) c.k = number_list(j["k"], "k");
  if (j.contains("a_vec")) {
    const json& a = j["a_vec"];
    if (!a.is_array()) {
      throw ConfigError("config key 'a_vec' must be a vector or a list of vectors");
    }
    if (!a.empty() && a.front().is_array()) {
      for (const auto& v : a) {
        c.a_vec.push_back(number_list(v, "a_vec"));
      }
    } else {
      c.a_vec.push_back(number_list(a, "a_vec"));
    }
  }
  if (j.contains("sign")) {
    for (double s : number_list(j["sign"], "sign")) {
      if (s != 1.0 && s != -1.0) {
        throw ConfigError("sign must be +1 or -1");
      }
      c.sign.push_back(static_cast<int>(s));
    }
  }
  if (j.contains("eta")) {
    const json& e = j["eta"];
    if (!e.is_object()) {
      throw ConfigError("config key 'eta' must be an object");
    }
    for (const auto& [key, v] : e.items()) {
      if (key == "kind") {
        try {
          c.eta.kind = EtaField::kind_from_name(get_as<std::string>(v, "eta.kind"));
        } catch (const InvalidParameter& ex) {
          throw ConfigError(ex.what());
        }
      } else if (key == "A") {
        c.eta.A = get_as<double>(v, "eta.A");
      } else if (key == "omega") {
        c.eta.omega = get_as<double>(v, "eta.omega");
      } else {
        throw ConfigError("unknown config key 'eta." + key + "'");
      }
    }
  }
  if (j.contains("draws")) c.draws = get_as<int>(j["draws"], "draws");
  if (j.contains("k1")) c.k1 = get_as<double>(j["k1"], "k1");
  if (j.contains("k2")) c.k2 = get_as<double>(j["k2"], "k2");
  return c;
}

json config_to_json(const SuiteConfig& c) {
  json j;
  j["suite"] = c.suite;
  j["dim"] = c.dim;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["tol"] = json::object();
  for (const auto& [cls, v] : default_tolerances()) {
    j["tol"][cls] = c.tolerance(cls);
  }
  if (c.box) j["box"] = {c.box->first, c.box->second};
  if (!c.m.empty()) j["m"] = c.m;
  if (!c.k.empty()) j["k"] = c.k;
  if (!c.a_vec.empty()) j["a_vec"] = c.a_vec;
  if (!c.sign.empty()) j["sign"] = c.sign;
  j["eta"] = {{"kind", EtaField::kind_name(c.eta.kind)}, {"A", c.eta.A}, {"omega", c.eta.omega}};
  if (c.draws) j["draws"] = *c.draws;
  j["k1"] = c.k1;
  j["k2"] = c.k2;
  return j;
}

void apply_tol_override(SuiteConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("tolerance override must look like class=value, got '" + assignment + "'");
  }
  const std::string cls = assignment.substr(0, eq);
  if (!default_tolerances().count(cls)) {
    throw ConfigError("unknown tolerance class '" + cls + "'");
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(assignment.substr(eq + 1), &used);
    if (used != assignment.size() - eq - 1) {
      throw std::invalid_argument("trailing characters");
    }
    c.tol[cls] = v;
  } catch (const std::exception&) {
    throw ConfigError("bad tolerance value in '" + assignment + "'");
  }
}

void validate_config(const SuiteConfig& c) {
  suite_info(c.suite);
  if (c.dim < 2 || c.dim > 4) {
    throw ConfigError("dim must be between 2 and 4");
  }
  if (c.samples < 1) {
    throw ConfigError("samples must be at least 1");
  }
  if (c.draws && *c.draws < 1) {
    throw ConfigError("draws must be at least 1");
  }
  for (const auto& [cls, v] : c.tol) {
    if (!(v > 0.0)) {
      throw ConfigError("tolerance '" + cls + "' must be positive");
    }
  }
  if (c.box && !(c.box->first < c.box->second)) {
    throw ConfigError("box must satisfy lo < hi");
  }
  for (const auto& a : c.a_vec) {
    if (static_cast<int>(a.size()) != c.dim) {
      throw ConfigError("a_vec entries must have dim components");
    }
  }
  for (double m : c.m) {
    if (m == 0.0 || m == 1.0) {
      throw ConfigError("m must differ from 0 and 1");
    }
  }
  if (!(c.eta.omega == c.eta.omega) || !(c.eta.A == c.eta.A)) {
    throw ConfigError("eta parameters must be finite");
  }
}

// ---------------------------------------------------------------- sampling

namespace {

double box_lo(const SuiteConfig& c, double fallback) { return c.box ? c.box->first : -fallback; }
double box_hi(const SuiteConfig& c, double fallback) { return c.box ? c.box->second : fallback; }

bool admissible(const ABMetric& M, const Vec<double>& x, const Vec<double>& y, SamplePolicy policy) {
  try {
    const RiemannData& g = M.geom();
    const Mat<double> a = g.a(x);
    const Vec<double> b = g.b(x);
    const double a2 = bilinear(a, y, y);
    if (!(a2 > 0.0)) {
      return false;
    }
    const double s = dot(b, y) / std::sqrt(a2);
    const double bn = std::sqrt(dot(b, mat_vec(inverse(a), b)));
    switch (policy) {
      case SamplePolicy::Regular:
        break;
      case SamplePolicy::PositiveSingular:
        if (!(s >= 0.1 * bn)) return false;
        break;
      case SamplePolicy::FourthClass:
        if (!(s >= 0.05 * bn && s <= 0.95 * bn)) return false;
        break;
    }
    const double F = M.F(x, y);
    if (!(std::isfinite(F) && F > 0.0)) {
      return false;
    }
    // Strong convexity with margin: phi - s phi' + (b^2 - s^2) phi'' >= margin * phi.
    const PhiValues v = phi_eval(M.phi(), s);
    return v.phi - s * v.d1 + (bn * bn - s * s) * v.d2 >= kRegularityMargin * v.phi;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::vector<Sample> sample_domain(const SuiteConfig& c, const ABMetric& M, SamplePolicy policy,
                                  std::uint64_t stream) {
  const int n = M.dim();
  const double lo = box_lo(c, 1.0);
  const double hi = box_hi(c, 1.0);
  std::seed_seq seq{static_cast<std::uint32_t>(c.seed), static_cast<std::uint32_t>(c.seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> ux(lo, hi);
  std::uniform_real_distribution<double> uy(-1.0, 1.0);
  std::vector<Sample> out;
  out.reserve(c.samples);
  for (int i = 0; i < c.samples; ++i) {
    bool found = false;
    for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
      Sample smp{Vec<double>(n), Vec<double>(n)};
      for (auto& v : smp.x) v = ux(rng);
      for (auto& v : smp.y) v = uy(rng);
      if (std::sqrt(dot(smp.y, smp.y)) < 0.1) {
        continue;
      }
      if (admissible(M, smp.x, smp.y, policy)) {
        out.push_back(std::move(smp));
        found = true;
      }
    }
    if (!found) {
      throw ConfigError("no admissible sample after 1000 attempts; check the box and metric parameters");
    }
  }
  return out;
}

// ---------------------------------------------------------------- reporting helpers

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string fmt_vec(const Vec<double>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += (i ? "," : "") + fmt_num(v[i]);
  }
  return s + ")";
}

// Ordered accumulation of named checks.
class Collector {
 public:
  explicit Collector(const SuiteConfig& c) : cfg_(c) {}

  CheckResult& check(const std::string& name, const std::string& eq, const std::string& cls,
                     Bound bound = Bound::Upper) {
    for (auto& r : checks_) {
      if (r.name == name) {
        return r;
      }
    }
    CheckResult r;
    r.name = name;
    r.eq = eq;
    r.tol_class = cls;
    r.tol = cfg_.tolerance(cls);
    r.bound = bound;
    checks_.push_back(std::move(r));
    sums_.push_back(0.0);
    return checks_.back();
  }

  void add(const std::string& name, const std::string& eq, const std::string& cls, double v,
           Bound bound = Bound::Upper) {
    CheckResult& r = check(name, eq, cls, bound);
    const std::size_t idx = static_cast<std::size_t>(&r - checks_.data());
    if (std::isnan(v)) {
      r.incidents.push_back("non-finite residual");
    }
    r.max_residual = r.samples == 0 ? v : std::max(r.max_residual, v);
    sums_[idx] += v;
    ++r.samples;
  }

  void incident(const std::string& name, const std::string& eq, const std::string& cls, const std::string& msg,
                Bound bound = Bound::Upper) {
    check(name, eq, cls, bound).incidents.push_back(msg);
  }

  // Folds a checker's residual map into the report under a prefix.
  void fold(const std::string& prefix, const CaseResiduals& cr) {
    for (const auto& e : cr.entries) {
      const std::string cls = e.tag == "K" ? "curvature" : "derivative";
      CheckResult& r = check(prefix + e.tag, e.eq, cls);
      const std::size_t idx = static_cast<std::size_t>(&r - checks_.data());
      r.max_residual = r.samples == 0 ? e.max : std::max(r.max_residual, e.max);
      sums_[idx] += e.sum;
      r.samples += e.count;
    }
    if (!cr.incidents.empty()) {
      CheckResult& r = check(prefix + "evaluation", "all samples evaluate", "derivative");
      r.incidents.insert(r.incidents.end(), cr.incidents.begin(), cr.incidents.end());
    }
  }

  std::vector<CheckResult> finish() {
    for (std::size_t i = 0; i < checks_.size(); ++i) {
      CheckResult& r = checks_[i];
      r.mean_residual = r.samples > 0 ? sums_[i] / r.samples : 0.0;
      const bool within = r.bound == Bound::Upper ? r.max_residual <= r.tol : r.max_residual >= r.tol;
      r.pass = r.incidents.empty() && r.samples > 0 && within;
    }
    return std::move(checks_);
  }

 private:
  const SuiteConfig& cfg_;
  std::vector<CheckResult> checks_;
  std::vector<double> sums_;
};

// Runs `body` on every sample, turning exceptions into incidents of `name`.
template <class Fn>
void for_samples(Collector& col, const std::vector<Sample>& samples, const std::string& name,
                 const std::string& eq, const std::string& cls, Fn body) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      body(samples[i]);
    } catch (const std::exception& e) {
      col.incident(name, eq, cls, "sample " + std::to_string(i) + ": " + e.what());
    }
  }
}

double route_residual(const ABMetric& M, const Sample& s) {
  return rel_residual(spray_generic(M, s.x, s.y), spray_structured(M, s.x, s.y));
}

double projective_residual(const ABMetric& M, const Sample& s) {
  return projective_fit(spray_generic(M, s.x, s.y), s.y).residual;
}

// Flag curvature without the collinearity gate; the projective check reports it.
double curvature(const ABMetric& M, const Sample& s) {
  return flag_curvature_projflat(M, s.x, s.y, std::numeric_limits<double>::infinity());
}

Vec<double> default_a(int n, double first) {
  Vec<double> a(n, 0.0);
  a[0] = first;
  return a;
}

constexpr const char* kRouteEq = "G^i from the Hessian of F^2 = structured (alpha, beta) spray";
constexpr const char* kProjEq = "G^i = P y^i";

// ---------------------------------------------------------------- suites

void suite_flat_parallel(const SuiteConfig& c, Collector& col) {
  const int n = c.dim;
  Vec<double> bconst{0.6, 0.3, -0.2, 0.1};
  bconst.resize(n);
  const RiemannData g = flat_parallel(bconst);
  const double k = c.k.empty() ? 0.5 : c.k.front();
  const double m = c.m.empty() ? 2.0 : c.m.front();
  const std::vector<std::pair<std::string, PhiSpec>> phis{
      {"first-class", PhiSpec::first_class(k)},
      {"third-class", PhiSpec::third_class(m, k)},
      {"fifth-class", PhiSpec::fifth_class(c.k1, c.k2, std::sqrt(dot(bconst, bconst)))},
  };
  std::uint64_t stream = 0;
  for (const auto& [label, phi] : phis) {
    const ABMetric M(g, phi);
    const auto samples = sample_domain(c, M, SamplePolicy::PositiveSingular, stream++);
    if (label == "first-class") {
      col.fold("flat-parallel ", check_flat_parallel(g, samples, {c.tolerance("derivative"), c.tolerance("curvature")}));
    }
    const std::string tag = " [" + label + "]";
    for_samples(col, samples, "G=G_alpha" + tag, "G^i = G^i_alpha", "algebraic", [&](const Sample& s) {
      col.add("G=G_alpha" + tag, "G^i = G^i_alpha", "algebraic",
              rel_residual(spray_structured(M, s.x, s.y), spray_riemann(g, s.x, s.y)));
      col.add("route" + tag, kRouteEq, "spray", route_residual(M, s));
      col.add("K=0" + tag, "K = 0", "curvature", std::abs(curvature(M, s)));
    });
  }
}

void suite_klein(const SuiteConfig& c, Collector& col, bool square) {
  const int n = c.dim;
  const double lo = box_lo(c, 0.5);
  const double hi = box_hi(c, 0.5);
  if (n * std::max(lo * lo, hi * hi) >= 1.0) {
    throw ConfigError("the box must lie inside the unit ball");
  }
  SuiteConfig cc = c;
  cc.box = std::make_pair(lo, hi);
  std::vector<Vec<double>> avecs = c.a_vec;
  if (avecs.empty()) {
    avecs = {Vec<double>(n, 0.0), default_a(n, 0.1)};
  }
  const std::vector<int> signs = c.sign.empty() ? std::vector<int>{1, -1} : c.sign;
  const double target = square ? 0.0 : -0.25;
  std::uint64_t stream = 0;
  for (const auto& a : avecs) {
    for (int sg : signs) {
      const ABMetric M = square ? make_square_klein(n, a, sg) : make_randers_klein(n, a, sg);
      const auto samples = sample_domain(cc, M, SamplePolicy::Regular, stream++);
      const std::string tag = " [a=" + fmt_vec(a) + ", sign=" + (sg > 0 ? "+" : "-") + "]";
      const std::string keq = square ? "K = 0" : "K = -1/4";
      for_samples(col, samples, "route" + tag, kRouteEq, "spray", [&](const Sample& s) {
        col.add("route" + tag, kRouteEq, "spray", route_residual(M, s));
        col.add("projective" + tag, kProjEq, "derivative", projective_residual(M, s));
        col.add((square ? "K=0" : "K=-1/4") + tag, keq, "curvature", std::abs(curvature(M, s) - target));
        if (!square) {
          // P = F_{x^k} y^k / (2F) for projectively flat metrics.
          const J1 F = M.F(lift(s.x, s.y), constant_lift(s.y));
          col.add("P=F_0/(2F)" + tag, "P = F_{x^k} y^k / (2F)", "spray",
                  rel_residual(projective_factor(M, s.x, s.y, 1.0), F.v1 / (2.0 * F.v0)));
        }
      });
    }
  }
}

void suite_mkropina_eta(const SuiteConfig& c, Collector& col) {
  const int n = c.dim;
  const std::vector<double> ms = c.m.empty() ? std::vector<double>{-1.0, -2.0, 0.5, 2.0, 3.0} : c.m;
  const std::vector<double> ks = c.k.empty() ? std::vector<double>{0.0, -0.5} : c.k;
  std::uint64_t stream = 0;
  for (double m : ms) {
    for (double k : ks) {
      const ABMetric M = make_third_class_eta(n, m, k, c.eta);
      const auto samples = sample_domain(c, M, SamplePolicy::PositiveSingular, stream++);
      const std::string tag = " [m=" + fmt_num(m) + ", k=" + fmt_num(k) + "]";
      const Vec<double> origin(n, 0.0);
      for_samples(col, samples, "route" + tag, kRouteEq, "spray", [&](const Sample& s) {
        col.add("route" + tag, kRouteEq, "spray", route_residual(M, s));
        col.add("projective" + tag, kProjEq, "derivative", projective_residual(M, s));
        col.add("K=0" + tag, "K = 0", "curvature", std::abs(curvature(M, s)));
        col.add("G_yyy" + tag, "d^3 G^i / dy^3 = 0", "derivative", spray_cubic_residual(M, s.x, s.y));
        col.add("alpha-not-flat" + tag, "max |R^i_jkl| of alpha", "nonflat",
                riemann_curvature(M.geom(), s.x).max_abs(), Bound::Lower);
        if (m == -1.0) {
          col.add("x-independence" + tag, "F(x, y) = F(0, y)", "algebraic",
                  rel_residual(M.F(s.x, s.y), M.F(origin, s.y)));
        }
      });
    }
  }
}

void suite_kropina_deform(const SuiteConfig& c, Collector& col) {
  const int n = c.dim;
  const std::vector<double> ks = c.k.empty() ? std::vector<double>{0.0} : c.k;
  for (double k : ks) {
    if (k != 0.0) {
      throw ConfigError("kropina-deform: the deformation a/b^2, b/b^2 is flat-parallel only for k = 0");
    }
  }
  std::uint64_t stream = 0;
  for (double k : ks) {
    const ABMetric M = make_third_class_eta(n, -1.0, k, c.eta);
    const auto samples = sample_domain(c, M, SamplePolicy::PositiveSingular, stream++);
    const std::string tag = " [k=" + fmt_num(k) + "]";
    std::vector<Vec<double>> probes;
    for (const auto& s : samples) {
      probes.push_back(s.x);
    }
    try {
      make_first_class_kropina(M.geom(), k, {}, probes);
      col.add("kropina-constraints" + tag, "r_00 = 2k beta s_0 + mu (a^2 + k beta^2), s_ij closed, G_alpha", "derivative",
              0.0);
    } catch (const ConstraintViolation& e) {
      col.add("kropina-constraints" + tag, "r_00 = 2k beta s_0 + mu (a^2 + k beta^2), s_ij closed, G_alpha", "derivative",
              e.residual());
    }
    const RiemannData d = deform_kropina(M.geom());
    const ABMetric Md(d, PhiSpec::first_class(k));
    for_samples(col, samples, "r~" + tag, "r~_ij = 0", "second_order", [&](const Sample& s) {
      const BetaDerivatives bd = beta_apparatus(d, s.x, s.y);
      col.add("r~" + tag, "r~_ij = 0", "second_order", max_abs(bd.r));
      col.add("s~" + tag, "s~_ij = 0", "second_order", max_abs(bd.s));
      col.add("G~_alpha" + tag, "G~^i_alpha = 0", "second_order", max_abs(spray_riemann(d, s.x, s.y)));
      col.add("G~" + tag, "G~^i = 0", "second_order", max_abs(spray_generic(Md, s.x, s.y)));
      col.add("R~" + tag, "R~^i_jkl = 0", "second_order", riemann_curvature(d, s.x).max_abs());
    });
  }
}

// Small rationals p/q drawn from the seed.
double draw_rational(std::mt19937_64& rng, int pmin, int pmax, int qmax) {
  std::uniform_int_distribution<int> P(pmin, pmax);
  std::uniform_int_distribution<int> Q(1, qmax);
  return static_cast<double>(P(rng)) / Q(rng);
}

void suite_ode_series(const SuiteConfig& c, Collector& col) {
  std::seed_seq seq{static_cast<std::uint32_t>(c.seed), 0x0de5u};
  std::mt19937_64 rng(seq);
  const int draws = c.draws.value_or(10);
  const int J = 4;
  for (int d = 0; d < draws; ++d) {
    double m = 0.0;
    do {
      m = draw_rational(rng, 1, 12, 4);
    } while (m == 1.0);
    const double b = draw_rational(rng, 2, 8, 4);
    double kb2 = 0.0;
    do {
      kb2 = draw_rational(rng, -8, 3, 4);
    } while (kb2 >= 1.0);  // k b^2 = 1 is the separate closed case
    const double k = kb2 / (b * b);
    const SeriesSolution sol = series_solve_w51(m, k, b, J);
    const std::vector<double> closed = series_closed_form_coefficients(m, k, b);
    double worst = 0.0;
    for (int j = 0; j < J; ++j) {
      worst = std::max(worst, rel_residual(sol.coeffs[j], closed[j]));
    }
    col.add("series-coefficients", "recurrence = closed-form a_{m+2}, ..., a_{m+8}", "identity", worst);

    const PhiSpec m2 = PhiSpec::fourth_closed_m2(k, b);
    const PhiSpec m4 = PhiSpec::fourth_closed_m4(k, b);
    for (int i = 0; i <= 18; ++i) {
      const double s = (0.05 + 0.05 * i) * b;
      try {
        col.add("quadrature=closed m=2", "quadrature phi = closed form, m = 2", "derivative",
                rel_residual(phi_fourth_class_quadrature(2.0, k, b, s), phi_eval(m2, s).phi));
        col.add("quadrature=closed m=4", "quadrature phi = closed form, m = 4", "derivative",
                rel_residual(phi_fourth_class_quadrature(4.0, k, b, s), phi_eval(m4, s).phi));
      } catch (const std::exception& e) {
        col.incident("quadrature=closed m=2", "quadrature phi = closed form, m = 2", "derivative", e.what());
      }
    }
    const PhiSpec w = make_phi_closed_form("w088", m, 0.0, b);
    const PhiSpec q = PhiSpec::fourth_quadrature(m, k, b);
    for (double frac : {0.2, 0.5, 0.8}) {
      const double s = frac * b;
      try {
        col.add("closed-k=1/b^2 ODE", "s^m (1 - s^2/b^2)^((1-m)/2) solves the fourth-class ODE", "derivative",
                ode_w51_residual(w, m, 1.0 / (b * b), b, s));
        col.add("closed m=2 ODE", "closed form m = 2 solves the ODE", "derivative", ode_w51_residual(m2, 2.0, k, b, s));
        col.add("closed m=4 ODE", "closed form m = 4 solves the ODE", "derivative", ode_w51_residual(m4, 4.0, k, b, s));
        col.add("quadrature ODE", "quadrature phi solves the ODE", "ode", ode_w51_residual(q, m, k, b, s));
      } catch (const std::exception& e) {
        col.incident("quadrature ODE", "quadrature phi solves the ODE", "ode", e.what());
      }
    }
  }
}

void suite_tilde_forms(const SuiteConfig& c, Collector& col) {
  std::seed_seq seq{static_cast<std::uint32_t>(c.seed), 0x711deu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int draws = c.draws.value_or(50);
  for (int d = 0; d < draws; ++d) {
    const double b = 0.3 + 1.2 * U(rng);
    const double k = (-2.0 + 2.9 * U(rng)) / (b * b);  // k b^2 in [-2, 0.9]
    const double alpha = 0.5 + 1.5 * U(rng);
    double beta = (2.0 * U(rng) - 1.0) * b * alpha;
    if (alpha * alpha - k * beta * beta <= 0.0) {
      beta *= 0.5;
    }
    try {
      const TildeForms t = identify_tilde_forms(b, k, alpha, beta);
      col.add("F_iii=alpha~+beta~", "F = alpha~ + beta~ (Randers type)", "identity",
              rel_residual(t.F_iii, t.randers_form));
      col.add("F_iv=(alpha~+beta~)^2/alpha~", "F = (alpha~ + beta~)^2 / alpha~ (square type)", "identity",
              rel_residual(t.F_iv, t.square_form));
      if (alpha * alpha - k * beta * beta > 0.0 && std::abs(beta) < b * alpha && k * b * b != 1.0) {
        const double s = beta / alpha;
        if (k * s * s < 1.0) {
          col.add("F_iii=alpha phi_m2(s)", "F = alpha phi(s) with the m = 2 closed form", "algebraic",
                  rel_residual(t.F_iii, alpha * phi_eval(PhiSpec::fourth_closed_m2(k, b), s).phi));
          col.add("F_iv=alpha phi_m4(s)", "F = alpha phi(s) with the m = 4 closed form", "algebraic",
                  rel_residual(t.F_iv, alpha * phi_eval(PhiSpec::fourth_closed_m4(k, b), s).phi));
        }
      }
    } catch (const std::exception& e) {
      col.incident("F_iii=alpha~+beta~", "F = alpha~ + beta~ (Randers type)", "identity", e.what());
    }
  }
}

// Pass on constructed data, then each 0.1 perturbation of one equation must be detected.
template <class Run>
void pass_and_detect(Collector& col, const std::string& prefix, const SuiteConfig& c, Run run) {
  const CheckTolerance tol{c.tolerance("derivative"), c.tolerance("curvature")};
  const CaseResiduals base = run(tol, std::optional<Perturbation>{});
  col.fold(prefix, base);
  for (const auto& e : base.entries) {
    if (e.tag == "projective") {
      continue;  // fit quality, not an equation with a right-hand side
    }
    const CaseResiduals bad = run(tol, Perturbation{e.tag, 0.1});
    const std::string name = prefix + e.tag + " perturbed";
    const std::string eq = "0.1 added to the right-hand side is detected";
    if (!bad.has(e.tag)) {
      col.incident(name, eq, "detect", "perturbed equation was not evaluated", Bound::Lower);
      continue;
    }
    col.add(name, eq, "detect", bad.residual(e.tag), Bound::Lower);
  }
}

void suite_conditions(const SuiteConfig& c, Collector& col) {
  const int n = c.dim;
  const double k = c.k.empty() ? 0.0 : c.k.front();
  const double m3 = c.m.empty() ? 2.0 : c.m.front();

  // Flat-parallel data.
  {
    Vec<double> bconst{0.6, 0.3, -0.2, 0.1};
    bconst.resize(n);
    const RiemannData g = flat_parallel(bconst);
    const auto samples = sample_domain(c, ABMetric(g, PhiSpec::first_class(k)), SamplePolicy::PositiveSingular, 0);
    pass_and_detect(col, "flat-parallel ", c, [&](CheckTolerance tol, const std::optional<Perturbation>& p) {
      return check_flat_parallel(g, samples, tol, p);
    });
  }
  // First class on the m = -1 eta family.
  {
    const ABMetric M = make_third_class_eta(n, -1.0, k, c.eta);
    const auto samples = sample_domain(c, M, SamplePolicy::PositiveSingular, 1);
    const ConditionParams params = estimate_params(Case::I, M.geom(), {-1.0, k, 0.0, 0.0, 0.0});
    pass_and_detect(col, "case-i ", c, [&](CheckTolerance tol, const std::optional<Perturbation>& p) {
      return check_case_i(M.geom(), k, params, samples, tol, p);
    });
  }
  // Third class on the eta family.
  {
    const ABMetric M = make_third_class_eta(n, m3, k, c.eta);
    const auto samples = sample_domain(c, M, SamplePolicy::PositiveSingular, 2);
    const ConditionParams params = estimate_params(Case::III, M.geom(), {m3, k, 0.0, 0.0, 0.0});
    pass_and_detect(col, "case-iii ", c, [&](CheckTolerance tol, const std::optional<Perturbation>& p) {
      return check_case_iii(M.geom(), m3, k, params, samples, tol, p);
    });
  }
  // Second-class identity.
  {
    std::seed_seq seq{static_cast<std::uint32_t>(c.seed), 0x5ecu};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> U(0.1, 1.5);
    const double mm = c.m.empty() ? 2.5 : c.m.front();
    const double kk = c.k.empty() ? 0.3 : c.k.front();
    for (double a1 : {0.0, 0.5}) {
      const PhiSpec phi = PhiSpec::second_class(mm, kk, a1);
      const std::string name = "second-class identity [a1=" + fmt_num(a1) + "]";
      const std::string eq = "phi'' = (k s^2 - m)(phi - s phi') / (s^2 (1 + k s^2))";
      for (int i = 0; i < c.samples; ++i) {
        const double s = U(rng);
        try {
          col.add(name, eq, "derivative", second_class_identity_residual(phi, mm, kk, s));
        } catch (const std::exception& e) {
          col.incident(name, eq, "derivative", e.what());
        }
      }
    }
  }
  // Cases ii, iv, v only have flat-parallel data available.
  if (n == 2) {
    const RiemannData g = flat_parallel({0.6, 0.3});
    const ConditionParams zero = ConditionParams::zero(2);
    const CheckTolerance tol{c.tolerance("derivative"), c.tolerance("curvature")};
    const auto singular = sample_domain(c, ABMetric(g, PhiSpec::first_class(k)), SamplePolicy::PositiveSingular, 3);
    col.fold("case-ii flat-parallel ", check_case_ii(g, m3, k, 0.5, zero, singular, tol));
    col.fold("case-v flat-parallel ", check_case_v(g, c.k1, c.k2, zero, singular, tol));
    const double b = std::sqrt(0.45);
    const auto fourth =
        sample_domain(c, ABMetric(g, PhiSpec::fourth_quadrature(2.0, 0.3, b)), SamplePolicy::FourthClass, 4);
    col.fold("case-iv flat-parallel ", check_case_iv(g, 2.0, 0.3, zero, fourth, tol));
  }
}

}  // namespace

// ---------------------------------------------------------------- registry

const std::vector<SuiteInfo>& registered_suites() {
  static const std::vector<SuiteInfo> suites{
      {"flat-parallel", "flat alpha with parallel beta: spray reduces to G_alpha, K = 0",
       "Flat alpha, constant beta.\n"
       "  - r_ij = 0, s_ij = 0 and the Riemann tensor of alpha vanishes\n"
       "  - the structured spray equals the spray of alpha for first, third and fifth class phi\n"
       "  - Hessian-of-F^2 spray equals the structured spray\n"
       "  - flag curvature K = 0"},
      {"randers-klein", "Funk-type Randers metric on the unit ball has K = -1/4",
       "F = alpha + beta, alpha the Klein metric, beta = +-(<x,y>/(1-|x|^2) + <a,y>/(1+<a,x>)).\n"
       "  - Hessian-of-F^2 spray equals the structured spray\n"
       "  - the spray is collinear with y (projectively flat)\n"
       "  - P = F_{x^k} y^k / (2F)\n"
       "  - flag curvature K = -1/4 from K = (P^2 - P_{x^k} y^k) / F^2"},
      {"square-klein", "lambda-scaled square metric (alpha + beta)^2 / alpha has K = 0",
       "F = (alpha + beta)^2 / alpha with alpha, beta as in randers-klein scaled by\n"
       "lambda = (1 + <a,x>)^2 / (1 - |x|^2).\n"
       "  - Hessian-of-F^2 spray equals the structured spray\n"
       "  - projectively flat, flag curvature K = 0"},
      {"mkropina-eta", "eta-deformed m-Kropina family: projectively flat, K = 0, Berwald, alpha not flat",
       "F = beta^m (alpha^2 + k beta^2)^((1-m)/2) with alpha^2 + k beta^2 = eta^(2m/(m-1)) |y|^2, beta = eta y^1.\n"
       "  - Hessian-of-F^2 spray equals the structured spray\n"
       "  - projectively flat with K = 0\n"
       "  - third y-derivatives of G^i vanish (spray quadratic in y)\n"
       "  - alpha has a Riemann tensor component >= 1e-3, so the data is not flat-parallel\n"
       "  - for m = -1, F does not depend on x"},
      {"kropina-deform", "Kropina deformation a/b^2, b/b^2 of the m = -1 family is flat-parallel",
       "First-class data from the eta family with m = -1.\n"
       "  - r_00 = 2k beta s_0 + mu (alpha^2 + k beta^2), closed s_ij and the G_alpha relation hold\n"
       "  - after a~ = a/b^2, b~ = b/b^2: r~ = s~ = 0, G~_alpha = 0, G~ = 0 and alpha~ is flat"},
      {"ode-series", "fourth-class ODE: series recurrence, quadrature and closed forms",
       "phi - s phi' + (b^2 - s^2) phi'' over s phi + (b^2 - s^2) phi' equals (m-1)/(s (1 - k s^2)).\n"
       "  - series recurrence reproduces the closed-form coefficients a_{m+2} .. a_{m+8}\n"
       "  - quadrature phi equals the closed forms for m = 2 and m = 4 on [0.05b, 0.95b]\n"
       "  - s^m (1 - s^2/b^2)^((1-m)/2) solves the ODE with k = 1/b^2\n"
       "  - the closed forms and quadrature phi solve the ODE"},
      {"tilde-forms", "two-dimensional fourth-class metrics are of Randers and square type",
       "With alpha~ = 2b^2 sqrt(alpha^2 - k beta^2)/(1 - k b^2), beta~ = -2b sqrt(b^2 alpha^2 - beta^2)/(1 - k b^2):\n"
       "  - the m = 2 metric equals alpha~ + beta~\n"
       "  - the m = 4 metric equals (alpha~ + beta~)^2 / alpha~ with the quartic prefactors\n"
       "  - both agree with alpha phi(s) for the closed-form phi"},
      {"conditions", "case checkers pass on constructed data and detect perturbations",
       "  - flat-parallel: r_ij, s_ij, R^i_jkl\n"
       "  - first class (phi = ks + 1/s) on the m = -1 eta family: closed s_ij, G_alpha relation, P formula,\n"
       "    then K = 0 and quadratic spray\n"
       "  - third class on the eta family: closed s_ij, r_ij relation, G_alpha relation, P formula, K = 0\n"
       "  - every equation perturbed by 0.1 must fail\n"
       "  - second-class identity phi'' = (k s^2 - m)(phi - s phi')/(s^2 (1 + k s^2))\n"
       "  - n = 2: cases with quadrature and fifth-class phi on flat-parallel data"},
  };
  return suites;
}

const SuiteInfo& suite_info(const std::string& id) {
  for (const auto& s : registered_suites()) {
    if (s.id == id) {
      return s;
    }
  }
  throw ConfigError("unknown suite '" + id + "' (see list-suites)");
}

SuiteReport run_suite(const SuiteConfig& c) {
  validate_config(c);
  const auto t0 = std::chrono::steady_clock::now();
  Collector col(c);
  try {
    if (c.suite == "flat-parallel") {
      suite_flat_parallel(c, col);
    } else if (c.suite == "randers-klein") {
      suite_klein(c, col, false);
    } else if (c.suite == "square-klein") {
      suite_klein(c, col, true);
    } else if (c.suite == "mkropina-eta") {
      suite_mkropina_eta(c, col);
    } else if (c.suite == "kropina-deform") {
      suite_kropina_deform(c, col);
    } else if (c.suite == "ode-series") {
      suite_ode_series(c, col);
    } else if (c.suite == "tilde-forms") {
      suite_tilde_forms(c, col);
    } else if (c.suite == "conditions") {
      suite_conditions(c, col);
    }
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("metric parameters invalid on the box: ") + e.what());
  }
  SuiteReport r;
  r.suite = c.suite;
  r.config = config_to_json(c);
  r.checks = col.finish();
  r.pass = std::all_of(r.checks.begin(), r.checks.end(), [](const CheckResult& x) { return x.pass; });
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------- reports

json report_to_json(const SuiteReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"eq", c.eq},
                      {"tol_class", c.tol_class},
                      {"tol", c.tol},
                      {"bound", c.bound == Bound::Upper ? "max" : "min"},
                      {"max_residual", c.max_residual},
                      {"mean_residual", c.mean_residual},
                      {"samples", c.samples},
                      {"incidents", c.incidents},
                      {"pass", c.pass}});
  }
  return {{"schema_version", kSchemaVersion}, {"engine_version", r.engine_version},
          {"suite", r.suite},                 {"config", r.config},
          {"checks", checks},                 {"pass", r.pass},
          {"runtime_ms", r.runtime_ms}};
}

SuiteReport report_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw ConfigError("unsupported report schema_version");
    }
    SuiteReport r;
    r.suite = j.at("suite").get<std::string>();
    r.config = j.at("config");
    r.pass = j.at("pass").get<bool>();
    r.runtime_ms = j.at("runtime_ms").get<double>();
    r.engine_version = j.value("engine_version", std::string(kEngineVersion));
    for (const auto& c : j.at("checks")) {
      CheckResult x;
      x.name = c.at("name").get<std::string>();
      x.eq = c.at("eq").get<std::string>();
      x.tol_class = c.value("tol_class", std::string());
      x.tol = c.value("tol", 0.0);
      x.bound = c.value("bound", std::string("max")) == "min" ? Bound::Lower : Bound::Upper;
      x.max_residual = c.at("max_residual").is_null() ? std::nan("") : c.at("max_residual").get<double>();
      x.mean_residual = c.at("mean_residual").is_null() ? std::nan("") : c.at("mean_residual").get<double>();
      x.samples = c.value("samples", 0);
      x.incidents = c.value("incidents", std::vector<std::string>{});
      x.pass = c.at("pass").get<bool>();
      r.checks.push_back(std::move(x));
    }
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

std::string emit_report(const SuiteReport& r, ReportFormat fmt) {
  if (fmt == ReportFormat::Json) {
    return report_to_json(r).dump(2) + "\n";
  }
  std::ostringstream os;
  os << "suite " << r.suite << "  (dim " << r.config.value("dim", 0) << ", samples " << r.config.value("samples", 0)
     << ", seed " << r.config.value("seed", 0) << ")\n";
  std::size_t width = 10;
  for (const auto& c : r.checks) {
    width = std::max(width, c.name.size());
  }
  os << std::left;
  for (const auto& c : r.checks) {
    os << (c.pass ? "  PASS  " : "  FAIL  ") << std::setw(static_cast<int>(width)) << c.name << "  max "
       << std::setw(11) << std::setprecision(3) << std::scientific << c.max_residual << " mean " << std::setw(11)
       << c.mean_residual << (c.bound == Bound::Upper ? " <= " : " >= ") << c.tol << std::defaultfloat << "  ("
       << c.tol_class << ", n=" << c.samples << ")\n";
    for (const auto& inc : c.incidents) {
      os << "        incident: " << inc << "\n";
    }
  }
  os << (r.pass ? "PASS" : "FAIL") << "  " << r.checks.size() << " checks in " << std::fixed << std::setprecision(1)
     << r.runtime_ms << " ms\n";
  return os.str();
}

void write_report(const SuiteReport& r, ReportFormat fmt, const std::string& path) {
  const std::string text = emit_report(r, fmt);
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open '" + path + "' for writing");
  }
  out << text;
  if (!out) {
    throw Error("write to '" + path + "' failed");
  }
}

}  // namespace projflat
