#include "projflat/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace projflat {
namespace {

template <class X>
using scalar_of = typename std::decay_t<X>::value_type;

template <class T>
T one_minus_r2(const Vec<T>& x) {
  T d(1.0);
  for (const auto& xi : x) {
    d -= xi * xi;
  }
  if (value_of(d) <= 0.0) {
    throw DomainError("Klein-type metric evaluated outside the unit ball");
  }
  return d;
}

void require_dim(int n, std::size_t a_size) {
  if (n < 2) {
    throw InvalidParameter("dimension must be at least 2");
  }
  if (a_size != static_cast<std::size_t>(n)) {
    throw InvalidParameter("a_vec length must equal the dimension");
  }
}

int unit_sign(int sign) {
  if (sign != 1 && sign != -1) {
    throw InvalidParameter("sign must be +1 or -1");
  }
  return sign;
}

// Klein alpha-tensor and Funk 1-form, times lambda^2 and lambda respectively.
template <class T>
Mat<T> klein_a(const Vec<T>& x, const T& lambda) {
  const int n = static_cast<int>(x.size());
  const T d = one_minus_r2(x);
  const T scale = lambda * lambda / (d * d);
  Mat<T> m(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      m(i, j) = ((i == j ? d : T(0.0)) + x[i] * x[j]) * scale;
    }
  }
  return m;
}

template <class T>
T one_plus_ax(const Vec<T>& x, const Vec<double>& a_vec) {
  T ax(1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ax += a_vec[i] * x[i];
  }
  if (value_of(ax) <= 0.0) {
    throw DomainError("1 + <a,x> must be positive");
  }
  return ax;
}

template <class T>
Vec<T> funk_b(const Vec<T>& x, const Vec<double>& a_vec, int sign, const T& lambda, KleinOneForm form) {
  const T d = one_minus_r2(x);
  const T ax = form == KleinOneForm::Closed ? one_plus_ax(x, a_vec) : d;
  Vec<T> b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    b[i] = (double(sign) * lambda) * (x[i] / d + a_vec[i] / ax);
  }
  return b;
}

template <class T>
T square_lambda(const Vec<T>& x, const Vec<double>& a_vec) {
  const T ax = one_plus_ax(x, a_vec);
  return ax * ax / one_minus_r2(x);
}

}  // namespace

EtaField::Kind EtaField::kind_from_name(const std::string& name) {
  if (name == "trig") return Kind::Trig;
  if (name == "sine") return Kind::Sine;
  if (name == "exp") return Kind::Exp;
  if (name == "constant") return Kind::Constant;
  throw InvalidParameter("unknown eta kind '" + name + "'");
}

std::string EtaField::kind_name(Kind k) {
  switch (k) {
    case Kind::Trig:
      return "trig";
    case Kind::Sine:
      return "sine";
    case Kind::Exp:
      return "exp";
    case Kind::Constant:
      return "constant";
  }
  return "unknown";
}

ConditionParams ConditionParams::zero(int n) {
  return {[n](const Vec<double>&) { return Vec<double>(n, 0.0); }, [](const Vec<double>&) { return 0.0; }};
}

ABMetric make_randers_klein(int n, const Vec<double>& a_vec, int sign, KleinOneForm form) {
  require_dim(n, a_vec.size());
  sign = unit_sign(sign);
  RiemannData geom(
      n, [](const auto& x) { return klein_a(x, scalar_of<decltype(x)>(1.0)); },
      [a_vec, sign, form](const auto& x) { return funk_b(x, a_vec, sign, scalar_of<decltype(x)>(1.0), form); });
  return ABMetric(std::move(geom), PhiSpec::randers());
}

ABMetric make_square_klein(int n, const Vec<double>& a_vec, int sign, KleinOneForm form) {
  require_dim(n, a_vec.size());
  sign = unit_sign(sign);
  RiemannData geom(
      n, [a_vec](const auto& x) { return klein_a(x, square_lambda(x, a_vec)); },
      [a_vec, sign, form](const auto& x) { return funk_b(x, a_vec, sign, square_lambda(x, a_vec), form); });
  return ABMetric(std::move(geom), PhiSpec::square_randers());
}

double square_klein_lambda(const Vec<double>& a_vec, const Vec<double>& x) {
  return square_lambda(x, a_vec);
}

RiemannData eta_family_geometry(int n, double m, double k, const EtaField& eta) {
  if (n < 2) {
    throw InvalidParameter("dimension must be at least 2");
  }
  if (m == 0.0 || m == 1.0) {
    throw InvalidParameter("m must differ from 0 and 1");
  }
  const double p = 2.0 * m / (m - 1.0);
  auto eta_checked = [eta](const auto& x) {
    auto e = eta(x);
    if (value_of(e) <= 0.0) {
      throw DomainError("eta must be positive");
    }
    return e;
  };
  return RiemannData(
      n,
      [n, p, k, eta_checked](const auto& x) {
        using T = scalar_of<decltype(x)>;
        const T e = eta_checked(x);
        const T conf = pow(e, p);
        Mat<T> a(n);
        for (int i = 0; i < n; ++i) {
          a(i, i) = conf;
        }
        a(0, 0) = conf - k * e * e;
        if (value_of(a(0, 0)) <= 0.0) {
          throw DomainError("eta-family alpha is not positive definite (k too large)");
        }
        return a;
      },
      [n, eta_checked](const auto& x) {
        using T = scalar_of<decltype(x)>;
        Vec<T> b(n, T(0.0));
        b[0] = eta_checked(x);
        return b;
      });
}

ABMetric make_third_class_eta(int n, double m, double k, const EtaField& eta) {
  return ABMetric(eta_family_geometry(n, m, k, eta), PhiSpec::third_class(m, k));
}

double kropina_mu(const RiemannData& geom, double k, const Vec<double>& x) {
  const BetaDerivatives bd = beta_apparatus(geom, x, Vec<double>(geom.dim(), 0.0));
  const double rbb = bilinear(bd.r, bd.bup, bd.bup);
  const double denom = bd.b2 * (1.0 + k * bd.b2);
  if (denom == 0.0) {
    throw DomainError("b^2 (1 + k b^2) vanishes");
  }
  return rbb / denom;
}

FirstClassKropina make_first_class_kropina(const RiemannData& geom, double k,
                                           std::function<double(const Vec<double>&)> mu,
                                           const std::vector<Vec<double>>& probes) {
  const int n = geom.dim();
  if (!mu) {
    mu = [geom, k](const Vec<double>& x) { return kropina_mu(geom, k, x); };
  }
  ConditionParams params;
  params.rho = [geom, mu](const Vec<double>& x) {
    const BetaDerivatives bd = beta_apparatus(geom, x, Vec<double>(geom.dim(), 0.0));
    const double m = mu(x);
    Vec<double> rho(bd.b.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
      rho[i] = (m * bd.b[i] + bd.sj[i]) / bd.b2;
    }
    return rho;
  };
  params.tau = [geom, mu](const Vec<double>& x) {
    const BetaDerivatives bd = beta_apparatus(geom, x, Vec<double>(geom.dim(), 0.0));
    return -mu(x) / (2.0 * bd.b2);
  };

  std::vector<Vec<double>> dirs;
  for (int i = 0; i < n; ++i) {
    Vec<double> e(n, 0.0);
    e[i] = 1.0;
    dirs.push_back(std::move(e));
  }
  Vec<double> mixed(n);
  for (int i = 0; i < n; ++i) {
    mixed[i] = 1.0 - 0.37 * i;
  }
  dirs.push_back(mixed);

  const double limit = 1e-8;
  for (const auto& x : probes) {
    const BetaDerivatives bd = beta_apparatus(geom, x, Vec<double>(n, 0.0));
    const double m = mu(x);
    Mat<double> r_rhs(n);
    Mat<double> s_lhs(n);
    Mat<double> s_rhs(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        r_rhs(i, j) = k * (bd.b[i] * bd.sj[j] + bd.b[j] * bd.sj[i]) +
                      m * (bd.a(i, j) + k * bd.b[i] * bd.b[j]);
        s_lhs(i, j) = bd.b2 * bd.s(i, j);
        s_rhs(i, j) = bd.b[i] * bd.sj[j] - bd.b[j] * bd.sj[i];
      }
    }
    const double res_r = rel_residual(bd.r, r_rhs);
    if (res_r > limit) {
      throw ConstraintViolation("r_00 != 2k beta s_0 + mu (alpha^2 + k beta^2)", res_r);
    }
    const double res_s = rel_residual(s_lhs, s_rhs);
    if (res_s > limit) {
      throw ConstraintViolation("s_ij != (b_i s_j - b_j s_i) / b^2", res_s);
    }
    const Vec<double> rho = params.rho(x);
    const Tensor3<double> gam = christoffel(geom, x);
    for (const auto& y : dirs) {
      const Vec<double> Ga = spray_from_christoffel(gam, y);
      const double a2 = bilinear(bd.a, y, y);
      const double be = dot(bd.b, y);
      const double r00 = bilinear(bd.r, y, y);
      const double rho0 = dot(rho, y);
      Vec<double> rhs(n);
      for (int i = 0; i < n; ++i) {
        rhs[i] = rho0 * y[i] - r00 * bd.bup[i] / (2.0 * bd.b2) -
                 (a2 - k * be * be) * bd.si[i] / (2.0 * bd.b2);
      }
      const double res_g = rel_residual(Ga, rhs);
      if (res_g > limit) {
        throw ConstraintViolation("G^i_alpha violates the first-class spray relation", res_g);
      }
    }
  }
  return {ABMetric(geom, PhiSpec::first_class(k)), std::move(params), std::move(mu)};
}

RiemannData deform_kropina(const RiemannData& g) {
  auto b2_of = [g](const auto& x) {
    const auto a = g.a(x);
    const auto b = g.b(x);
    const auto b2 = dot(b, mat_vec(inverse(a), b));
    if (value_of(b2) <= 0.0) {
      throw DomainError("deformation needs b^2 > 0");
    }
    return b2;
  };
  return RiemannData(
      g.dim(),
      [g, b2_of](const auto& x) {
        auto a = g.a(x);
        const auto b2 = b2_of(x);
        for (int i = 0; i < a.dim(); ++i) {
          for (int j = 0; j < a.dim(); ++j) {
            a(i, j) = a(i, j) / b2;
          }
        }
        return a;
      },
      [g, b2_of](const auto& x) {
        auto b = g.b(x);
        const auto b2 = b2_of(x);
        for (auto& bi : b) {
          bi = bi / b2;
        }
        return b;
      });
}

double SeriesSolution::eval(double s) const {
  double acc = 1.0;
  double pw = 1.0;
  for (double c : coeffs) {
    pw *= s * s;
    acc += c * pw;
  }
  return std::pow(s, m) * acc;
}

SeriesSolution series_solve_w51(double m, double k, double b, int J) {
  if (!(b > 0.0)) {
    throw InvalidParameter("b must be positive");
  }
  if (J < 1) {
    throw InvalidParameter("series order must be at least 1");
  }
  SeriesSolution out;
  out.m = m;
  out.k = k;
  out.b = b;
  const double kb2 = k * b * b;
  double prev2 = 0.0;  // a_{m+2(i-2)}
  double prev1 = 1.0;  // a_{m+2(i-1)}, a_m = 1
  for (int i = 1; i <= J; ++i) {
    const double denom = 2.0 * i * b * b * (m + 2.0 * i);
    if (denom == 0.0) {
      throw InvalidParameter("series recurrence denominator vanishes (m = -" + std::to_string(2 * i) + ")");
    }
    const double p = m + 2.0 * i - 2.0;
    const double q = m + 2.0 * i - 4.0;
    const double ci = ((p - 1.0) * (2.0 * i + kb2 * p) * prev1 + k * (1.0 - q * q) * prev2) / denom;
    out.coeffs.push_back(ci);
    prev2 = prev1;
    prev1 = ci;
  }
  return out;
}

std::vector<double> series_closed_form_coefficients(double m, double k, double b) {
  const double b2 = b * b;
  const double kb2 = k * b2;
  const double a2 = (m - 1.0) * (m * kb2 + 2.0) / (2.0 * (m + 2.0) * b2);
  const double a4 = (m * m - 1.0) * (m * kb2 * (m * kb2 + 2.0 * kb2 + 4.0) + 8.0) /
                    (8.0 * (m + 2.0) * (m + 4.0) * b2 * b2);
  const double a6 = (m + 3.0) / (6.0 * (m + 6.0) * b2) *
                    ((m * kb2 + 4.0 * kb2 + 6.0) * a4 - (m + 1.0) * k * a2);
  const double a8 = (m + 5.0) / (8.0 * (m + 8.0) * b2) *
                    ((m * kb2 + 6.0 * kb2 + 8.0) * a6 - (m + 3.0) * k * a4);
  return {a2, a4, a6, a8};
}

PhiSpec make_phi_closed_form(const std::string& which, double m, double k, double b) {
  if (which == "w088") {
    if (!(b > 0.0)) {
      throw InvalidParameter("b must be positive");
    }
    // phi = s^m (1 - s^2/b^2)^((1-m)/2); solves the ODE at k = 1/b^2.
    return PhiSpec::third_class(m, -1.0 / (b * b));
  }
  if (which == "y088") {
    return PhiSpec::fourth_closed_m2(k, b);
  }
  if (which == "y089") {
    return PhiSpec::fourth_closed_m4(k, b);
  }
  throw InvalidParameter("unknown closed form '" + which + "'");
}

TildeForms identify_tilde_forms(double b, double k, double alpha_val, double beta_val) {
  const double d = 1.0 - k * b * b;
  if (!(d > 0.0)) {
    throw InvalidParameter("tilde identification needs k < 1/b^2");
  }
  const double ak = alpha_val * alpha_val - k * beta_val * beta_val;
  const double bb = b * b * alpha_val * alpha_val - beta_val * beta_val;
  if (!(ak > 0.0)) {
    throw DomainError("alpha^2 - k beta^2 must be positive");
  }
  if (bb < 0.0) {
    throw DomainError("b^2 alpha^2 - beta^2 must be non-negative");
  }
  const double ra = std::sqrt(ak);
  const double rb = std::sqrt(bb);
  TildeForms t;
  t.F_iii = 2.0 * b / d * (b * ra - rb);
  t.alpha_t_iii = 2.0 * b * b * ra / d;
  t.beta_t_iii = -2.0 * b * rb / d;
  t.randers_form = t.alpha_t_iii + t.beta_t_iii;
  const double inner = b * ra - rb;
  t.F_iv = 4.0 * b * b / (d * d) * inner * inner / ra;
  t.alpha_t_iv = 4.0 * b * b * b * b * ra / (d * d);
  t.beta_t_iv = -4.0 * b * b * b * rb / (d * d);
  const double sum = t.alpha_t_iv + t.beta_t_iv;
  t.square_form = sum * sum / t.alpha_t_iv;
  return t;
}

}  // namespace projflat
