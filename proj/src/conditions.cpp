#include "projflat/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace projflat {

bool CaseResiduals::pass() const {
  if (!incidents.empty()) {
    return false;
  }
  return std::all_of(entries.begin(), entries.end(), [](const ResidualEntry& e) { return e.pass(); });
}

const ResidualEntry& CaseResiduals::entry(const std::string& tag) const {
  for (const auto& e : entries) {
    if (e.tag == tag) {
      return e;
    }
  }
  throw std::out_of_range("no residual entry '" + tag + "'");
}

double CaseResiduals::residual(const std::string& tag) const { return entry(tag).max; }

bool CaseResiduals::has(const std::string& tag) const {
  return std::any_of(entries.begin(), entries.end(), [&](const ResidualEntry& e) { return e.tag == tag; });
}

void CaseResiduals::record(const std::string& tag, const std::string& eq, double value, double tol) {
  for (auto& e : entries) {
    if (e.tag == tag) {
      e.max = std::max(e.max, value);
      e.sum += value;
      ++e.count;
      return;
    }
  }
  entries.push_back({tag, eq, value, value, 1, tol});
}

namespace {

double bump(const std::optional<Perturbation>& p, const std::string& tag) {
  return p && p->tag == tag ? p->amount : 0.0;
}

Mat<double> shifted(Mat<double> m, double d) {
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = 0; j < m.dim(); ++j) {
      m(i, j) += d;
    }
  }
  return m;
}

Vec<double> shifted(Vec<double> v, double d) {
  for (auto& x : v) {
    x += d;
  }
  return v;
}

// One tensor equation lhs = rhs holding at a point.
struct TensorEq {
  std::string tag;
  std::string eq;
  Mat<double> lhs;
  Mat<double> rhs;
};

struct PointData {
  BetaDerivatives bd;
  Vec<double> Ga;
  double alpha = 0.0;
  double beta = 0.0;
  double s = 0.0;
  double rho0 = 0.0;
  double tau = 0.0;
};

PointData point_data(const RiemannData& g, const Sample& smp, const ConditionParams& params) {
  PointData d;
  d.bd = beta_apparatus(g, smp.x, smp.y);
  d.Ga = spray_from_christoffel(christoffel(g, smp.x), smp.y);
  d.alpha = std::sqrt(bilinear(d.bd.a, smp.y, smp.y));
  d.beta = dot(d.bd.b, smp.y);
  d.s = d.beta / d.alpha;
  d.rho0 = params.rho ? dot(params.rho(smp.x), smp.y) : 0.0;
  d.tau = params.tau ? params.tau(smp.x) : 0.0;
  return d;
}

Mat<double> sym_bs(const BetaDerivatives& bd) {
  const int n = bd.a.dim();
  Mat<double> m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = bd.b[i] * bd.sj[j] + bd.b[j] * bd.sj[i];
    }
  }
  return m;
}

// tau {A b^2 a_ij + B b_i b_j}
Mat<double> ab_combo(const BetaDerivatives& bd, double A, double B) {
  const int n = bd.a.dim();
  Mat<double> m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = A * bd.b2 * bd.a(i, j) + B * bd.b[i] * bd.b[j];
    }
  }
  return m;
}

Mat<double> add(const Mat<double>& a, double ca, const Mat<double>& b, double cb) {
  Mat<double> m(a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) {
      m(i, j) = ca * a(i, j) + cb * b(i, j);
    }
  }
  return m;
}

TensorEq closed_s(const BetaDerivatives& bd) {
  const int n = bd.a.dim();
  Mat<double> lhs(n);
  Mat<double> rhs(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      lhs(i, j) = bd.b2 * bd.s(i, j);
      rhs(i, j) = bd.b[i] * bd.sj[j] - bd.b[j] * bd.sj[i];
    }
  }
  return {"s_ij", "b^2 s_ij = b_i s_j - b_j s_i", lhs, rhs};
}

// Everything that differs between the cases.
struct CaseModel {
  Case which;
  CaseConstants cc;

  PhiSpec phi(double b) const {
    switch (which) {
      case Case::I:
        return PhiSpec::first_class(cc.k);
      case Case::II:
        return PhiSpec::second_class(cc.m, cc.k, cc.a1);
      case Case::III:
        return PhiSpec::third_class(cc.m, cc.k);
      case Case::IV:
        return PhiSpec::fourth_quadrature(cc.m, cc.k, b);
      case Case::V:
        return PhiSpec::fifth_class(cc.k1, cc.k2, b);
    }
    throw InvalidParameter("unknown case");
  }

  std::vector<TensorEq> tensor_eqs(const BetaDerivatives& bd, double tau) const {
    const double m = cc.m;
    const double k = cc.k;
    const double b2 = bd.b2;
    switch (which) {
      case Case::I:
        return {closed_s(bd)};
      case Case::II:
        return {{"b_ij", "b_i|j = 2 tau {m b^2 a_ij - (m+1+k b^2) b_i b_j}", bd.bij,
                 add(ab_combo(bd, m, -(m + 1.0 + k * b2)), 2.0 * tau, bd.a, 0.0)}};
      case Case::III:
        return {closed_s(bd),
                {"r_ij",
                 "r_ij = 2 tau {m b^2 a_ij - (m+1+k b^2) b_i b_j} - (m+1+2k b^2)/((m-1) b^2) (b_i s_j + b_j s_i)",
                 bd.r,
                 add(ab_combo(bd, m, -(m + 1.0 + k * b2)), 2.0 * tau, sym_bs(bd),
                     -(m + 1.0 + 2.0 * k * b2) / ((m - 1.0) * b2))}};
      case Case::IV:
        return {{"r_ij", "r_ij = -(b_i s_j + b_j s_i) / b^2", bd.r, add(sym_bs(bd), -1.0 / b2, bd.a, 0.0)}};
      case Case::V: {
        const double k1 = cc.k1;
        const double k2 = cc.k2;
        const double coef = ((3.0 * k1 + k2 * k2) * b2 * b2 - 4.0) / (8.0 * b2 * (1.0 + k2 * b2));
        return {{"r_ij",
                 "r_ij = -2 tau {3 b^2 a_ij + (k2 b^2 - 2) b_i b_j} + ((3k1+k2^2) b^4 - 4)/(8 b^2 (1+k2 b^2)) (b_i s_j + b_j s_i)",
                 bd.r, add(ab_combo(bd, 3.0, k2 * b2 - 2.0), -2.0 * tau, sym_bs(bd), coef)}};
      }
    }
    return {};
  }

  std::string galpha_eq() const {
    switch (which) {
      case Case::I:
        return "G^i_a = rho y^i - r_00 b^i/(2b^2) - (a^2 - k beta^2) s^i/(2b^2)";
      case Case::II:
        return "G^i_a = rho y^i - tau (m a^2 - k beta^2) b^i";
      case Case::III:
        return "G^i_a = rho y^i + {2k beta s_0/((m-1)b^2) - tau (m a^2 - k beta^2)} b^i - (m a^2 + k beta^2)/((m-1)b^2) s^i";
      case Case::IV:
        return "G^i_a = rho y^i - ((m-2) a^2 + k beta^2)/((m-1)b^2) s^i";
      case Case::V:
        return "G^i_a = rho y^i + tau (3a^2 + k2 beta^2) b^i + {...} s^i";
    }
    return "";
  }

  /// Right-hand side of the G_alpha equation with rho0 = rho_i y^i.
  Vec<double> galpha_rhs(const PointData& d, const Vec<double>& y) const {
    const BetaDerivatives& bd = d.bd;
    const int n = static_cast<int>(y.size());
    const double a2 = d.alpha * d.alpha;
    const double be2 = d.beta * d.beta;
    const double b2 = bd.b2;
    const double s0 = dot(bd.sj, y);
    const double r00 = bilinear(bd.r, y, y);
    const double m = cc.m;
    const double k = cc.k;
    double cb = 0.0;  // coefficient of b^i
    double cs = 0.0;  // coefficient of s^i
    switch (which) {
      case Case::I:
        cb = -r00 / (2.0 * b2);
        cs = -(a2 - k * be2) / (2.0 * b2);
        break;
      case Case::II:
        cb = -d.tau * (m * a2 - k * be2);
        break;
      case Case::III:
        cb = 2.0 * k * d.beta * s0 / ((m - 1.0) * b2) - d.tau * (m * a2 - k * be2);
        cs = -(m * a2 + k * be2) / ((m - 1.0) * b2);
        break;
      case Case::IV:
        cs = -((m - 2.0) * a2 + k * be2) / ((m - 1.0) * b2);
        break;
      case Case::V: {
        const double k1 = cc.k1;
        const double k2 = cc.k2;
        cb = d.tau * (3.0 * a2 + k2 * be2);
        cs = (k1 - k2 * k2) / (8.0 * (1.0 + k2 * b2)) * (3.0 * b2 * a2 - be2) +
             (k2 / 2.0 - 3.0 / (4.0 * b2)) * a2 - k2 / b2 * be2;
        break;
      }
    }
    Vec<double> out(n);
    for (int i = 0; i < n; ++i) {
      out[i] = d.rho0 * y[i] + cb * bd.bup[i] + cs * bd.si[i];
    }
    return out;
  }

  std::string p_eq() const {
    switch (which) {
      case Case::I:
        return "P = rho - {(a^2 - k beta^2) s_0 + r_00 beta} / (b^2 (a^2 + k beta^2))";
      case Case::II:
        return "P = rho + tau a {s(-m + k s^2) - s^2 (1 + k s^2) phi'/phi}";
      case Case::III:
        return "P = rho - 2m tau beta - 2m s_0/((m-1) b^2)";
      case Case::IV:
        return "P = rho + {s(k s^2 - 1) phi'/phi - k s^2 - m + 2} s_0/((m-1) b^2)";
      case Case::V:
        return "P = rho + 2 tau beta {3 - 2c beta^4/D} + ((k2 b^2 - 3)/(2b^2) + T) s_0";
    }
    return "";
  }

  double p_formula(const PointData& d, const Vec<double>& y, const PhiSpec& phi) const {
    const BetaDerivatives& bd = d.bd;
    const double a2 = d.alpha * d.alpha;
    const double be = d.beta;
    const double be2 = be * be;
    const double b2 = bd.b2;
    const double s = d.s;
    const double s0 = dot(bd.sj, y);
    const double r00 = bilinear(bd.r, y, y);
    const double m = cc.m;
    const double k = cc.k;
    switch (which) {
      case Case::I:
        return d.rho0 - ((a2 - k * be2) * s0 + r00 * be) / (b2 * (a2 + k * be2));
      case Case::II: {
        const PhiValues v = phi_eval(phi, s);
        return d.rho0 + d.tau * d.alpha * (s * (-m + k * s * s) - s * s * (1.0 + k * s * s) * v.d1 / v.phi);
      }
      case Case::III:
        return d.rho0 - 2.0 * m * d.tau * be - 2.0 * m * s0 / ((m - 1.0) * b2);
      case Case::IV: {
        const PhiValues v = phi_eval(phi, s);
        return d.rho0 + (s * (k * s * s - 1.0) * v.d1 / v.phi - k * s * s - m + 2.0) * s0 / ((m - 1.0) * b2);
      }
      case Case::V: {
        const double k2 = cc.k2;
        const double c = cc.k1 - k2 * k2;
        const double a4 = a2 * a2;
        const double be4 = be2 * be2;
        const double D = a4 + c * be4 + k2 * be2 * (2.0 * a2 + k2 * be2);
        const double T = c *
                         (4.0 * be2 * (2.0 * be2 - b2 * a2) + 3.0 * b2 * b2 * (a4 + c * be4) +
                          k2 * b2 * be2 * (6.0 * b2 * a2 + 4.0 * be2 + 3.0 * k2 * b2 * be2)) /
                         (8.0 * b2 * (1.0 + k2 * b2) * D);
        return d.rho0 + 2.0 * d.tau * be * (3.0 - 2.0 * c * be4 / D) + ((k2 * b2 - 3.0) / (2.0 * b2) + T) * s0;
      }
    }
    return 0.0;
  }
};

double r00_mu_residual(const BetaDerivatives& bd, double k, double mu, const Vec<double>& y) {
  const double be = dot(bd.b, y);
  const double a2 = bilinear(bd.a, y, y);
  const double r00 = bilinear(bd.r, y, y);
  return rel_residual(r00, 2.0 * k * be * dot(bd.sj, y) + mu * (a2 + k * be * be));
}

double grad_b2_max(const RiemannData& g, const Vec<double>& x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const Vec<J1> xl = lift_axis(x, j);
    const Vec<J1> b = g.b(xl);
    const J1 b2 = dot(b, mat_vec(inverse(g.a(xl)), b));
    worst = std::max(worst, std::abs(b2.v1));
  }
  return worst;
}

void require_samples(const std::vector<Sample>& samples, int n) {
  if (samples.empty()) {
    throw InvalidParameter("no samples to check");
  }
  for (const auto& s : samples) {
    if (static_cast<int>(s.x.size()) != n || static_cast<int>(s.y.size()) != n) {
      throw InvalidParameter("sample dimension does not match the data");
    }
  }
}

CaseResiduals run_case(const CaseModel& model, const RiemannData& g, const ConditionParams& params,
                       const std::vector<Sample>& samples, CheckTolerance tol,
                       const std::optional<Perturbation>& perturb) {
  require_samples(samples, g.dim());
  CaseResiduals out;
  std::optional<PhiSpec> phi;
  std::vector<char> ok(samples.size(), 0);
  bool r00_mu_holds = true;

  for (std::size_t idx = 0; idx < samples.size(); ++idx) {
    const Sample& smp = samples[idx];
    try {
      const PointData d = point_data(g, smp, params);
      if (!phi) {
        phi = model.phi(std::sqrt(d.bd.b2));
      }
      for (const TensorEq& te : model.tensor_eqs(d.bd, d.tau)) {
        out.record(te.tag, te.eq, rel_residual(te.lhs, shifted(te.rhs, bump(perturb, te.tag))), tol.equation);
      }
      out.record("G_alpha", model.galpha_eq(),
                 rel_residual(d.Ga, shifted(model.galpha_rhs(d, smp.y), bump(perturb, "G_alpha"))),
                 tol.equation);

      const ABMetric M(g, *phi);
      const ProjectiveFit<double> fit = projective_fit(spray_generic(M, smp.x, smp.y), smp.y);
      out.record("projective", "G^i = P y^i", fit.residual, tol.equation);
      out.record("P", model.p_eq(),
                 rel_residual(fit.P, model.p_formula(d, smp.y, *phi) + bump(perturb, "P")), tol.equation);

      if (model.which == Case::I) {
        const double mu = kropina_mu(g, model.cc.k, smp.x);
        r00_mu_holds = r00_mu_holds && r00_mu_residual(d.bd, model.cc.k, mu, smp.y) <= tol.equation;
      }
      if (model.which == Case::IV) {
        out.record("db2", "d(b^2) = 0", grad_b2_max(g, smp.x) + bump(perturb, "db2"), tol.equation);
      }
      ok[idx] = 1;
    } catch (const std::exception& e) {
      out.incidents.push_back("sample " + std::to_string(idx) + ": " + e.what());
    }
  }

  // Consequences checked only where the equations hold.
  const bool berwald = model.which == Case::III || (model.which == Case::I && r00_mu_holds);
  if (!out.pass() || !phi) {
    return out;
  }
  for (std::size_t idx = 0; idx < samples.size(); ++idx) {
    if (!ok[idx]) {
      continue;
    }
    const Sample& smp = samples[idx];
    try {
      const ABMetric M(g, *phi);
      if (berwald) {
        out.record("K", "K = 0", std::abs(flag_curvature_projflat(M, smp.x, smp.y) - bump(perturb, "K")),
                   tol.curvature);
        out.record("G_yyy", "d^3 G^i / dy^3 = 0", spray_cubic_residual(M, smp.x, smp.y) + bump(perturb, "G_yyy"),
                   tol.equation);
      }
      if (model.which == Case::V) {
        const BetaDerivatives bd = beta_apparatus(g, smp.x, smp.y);
        out.record("s_j", "s_j = 0", max_abs(shifted(bd.sj, bump(perturb, "s_j"))), tol.equation);
        const double tau = params.tau ? params.tau(smp.x) : 0.0;
        out.record("tau", "tau = 0", std::abs(tau + bump(perturb, "tau")), tol.equation);
      }
    } catch (const std::exception& e) {
      out.incidents.push_back("sample " + std::to_string(idx) + ": " + e.what());
    }
  }
  return out;
}

void require_dim2(const RiemannData& g, const char* which) {
  if (g.dim() != 2) {
    throw InvalidParameter(std::string(which) + " is defined for n = 2 only");
  }
}

}  // namespace

CaseResiduals check_flat_parallel(const RiemannData& g, const std::vector<Sample>& samples, CheckTolerance tol,
                                  const std::optional<Perturbation>& perturb) {
  require_samples(samples, g.dim());
  CaseResiduals out;
  const int n = g.dim();
  for (std::size_t idx = 0; idx < samples.size(); ++idx) {
    try {
      const BetaDerivatives bd = beta_apparatus(g, samples[idx].x, samples[idx].y);
      out.record("r_ij", "r_ij = 0", max_abs(shifted(bd.r, -bump(perturb, "r_ij"))), tol.equation);
      out.record("s_ij", "s_ij = 0", max_abs(shifted(bd.s, -bump(perturb, "s_ij"))), tol.equation);
      const Tensor4<double> R = riemann_curvature(g, samples[idx].x);
      const double d = bump(perturb, "R");
      double worst = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
              worst = std::max(worst, std::abs(R(i, j, k, l) - d));
            }
          }
        }
      }
      out.record("R", "R^i_jkl = 0", worst, tol.equation);
    } catch (const std::exception& e) {
      out.incidents.push_back("sample " + std::to_string(idx) + ": " + e.what());
    }
  }
  return out;
}

CaseResiduals check_case_i(const RiemannData& g, double k, const ConditionParams& params,
                           const std::vector<Sample>& samples, CheckTolerance tol,
                           const std::optional<Perturbation>& perturb) {
  CaseConstants cc;
  cc.m = -1.0;
  cc.k = k;
  return run_case({Case::I, cc}, g, params, samples, tol, perturb);
}

CaseResiduals check_case_ii(const RiemannData& g, double m, double k, double a1, const ConditionParams& params,
                            const std::vector<Sample>& samples, CheckTolerance tol,
                            const std::optional<Perturbation>& perturb) {
  return run_case({Case::II, {m, k, a1, 0.0, 0.0}}, g, params, samples, tol, perturb);
}

CaseResiduals check_case_iii(const RiemannData& g, double m, double k, const ConditionParams& params,
                             const std::vector<Sample>& samples, CheckTolerance tol,
                             const std::optional<Perturbation>& perturb) {
  return run_case({Case::III, {m, k, 0.0, 0.0, 0.0}}, g, params, samples, tol, perturb);
}

CaseResiduals check_case_iv(const RiemannData& g, double m, double k, const ConditionParams& params,
                            const std::vector<Sample>& samples, CheckTolerance tol,
                            const std::optional<Perturbation>& perturb) {
  require_dim2(g, "case iv");
  return run_case({Case::IV, {m, k, 0.0, 0.0, 0.0}}, g, params, samples, tol, perturb);
}

CaseResiduals check_case_v(const RiemannData& g, double k1, double k2, const ConditionParams& params,
                           const std::vector<Sample>& samples, CheckTolerance tol,
                           const std::optional<Perturbation>& perturb) {
  require_dim2(g, "case v");
  if (k1 == k2 * k2) {
    throw ReducibleCaseError("k1 = k2^2 reduces to the third class with m = -3");
  }
  CaseConstants cc;
  cc.m = -3.0;
  cc.k1 = k1;
  cc.k2 = k2;
  return run_case({Case::V, cc}, g, params, samples, tol, perturb);
}

ConditionParams estimate_params(Case c, const RiemannData& g, const CaseConstants& cc) {
  if (c == Case::I) {
    const double k = cc.k;
    return make_first_class_kropina(g, k, {}, {}).params;
  }
  const CaseModel model{c, cc};
  const int n = g.dim();
  ConditionParams p;
  p.tau = [g, c, cc](const Vec<double>& x) {
    if (c == Case::IV) {
      return 0.0;
    }
    const BetaDerivatives bd = beta_apparatus(g, x, Vec<double>(g.dim(), 0.0));
    const double kk = c == Case::V ? cc.k2 : cc.k;
    const double rbb = bilinear(bd.r, bd.bup, bd.bup);
    return -rbb / (2.0 * bd.b2 * bd.b2 * (1.0 + kk * bd.b2));
  };
  p.rho = [g, model, n, tau = p.tau](const Vec<double>& x) {
    ConditionParams no_rho;
    no_rho.tau = tau;
    Vec<double> rho(n);
    for (int i = 0; i < n; ++i) {
      Vec<double> e(n, 0.0);
      e[i] = 1.0;
      const PointData d = point_data(g, {x, e}, no_rho);
      rho[i] = d.Ga[i] - model.galpha_rhs(d, e)[i];
    }
    return rho;
  };
  return p;
}

ConditionParams shift_rho(const ConditionParams& p, int axis, double delta) {
  ConditionParams out = p;
  out.rho = [rho = p.rho, axis, delta](const Vec<double>& x) {
    Vec<double> r = rho(x);
    r.at(static_cast<std::size_t>(axis)) += delta;
    return r;
  };
  return out;
}

}  // namespace projflat
