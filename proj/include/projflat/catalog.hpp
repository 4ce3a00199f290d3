#pragma once

// Constructors for the concrete metric families: Klein-type Randers and
// square metrics, the eta-deformed m-Kropina family and its Kropina
// specialisation, the Kropina deformation, and the power-series solution of
// the fourth-class ODE.

#include <string>
#include <vector>

#include "projflat/abmetric.hpp"
#include "projflat/phi.hpp"
#include "projflat/riemann.hpp"

namespace projflat {

/// Positive scalar field eta(x) from a fixed analytic family.
///   Trig: 1 + A sin(w x^1) cos(w x^2)
///   Sine: 1 + A sin(w x^1)
///   Exp:  exp(A sin(w x^1))
///   Constant: 1
struct EtaField {
  enum class Kind { Trig, Sine, Exp, Constant };
  Kind kind = Kind::Trig;
  double A = 0.3;
  double omega = 1.0;

  template <class T>
  T operator()(const Vec<T>& x) const {
    switch (kind) {
      case Kind::Trig:
        return T(1.0) + A * sin(omega * x[0]) * (x.size() > 1 ? cos(omega * x[1]) : T(1.0));
      case Kind::Sine:
        return T(1.0) + A * sin(omega * x[0]);
      case Kind::Exp:
        return exp(A * sin(omega * x[0]));
      case Kind::Constant:
        return T(1.0);
    }
    return T(1.0);
  }

  static Kind kind_from_name(const std::string& name);
  static std::string kind_name(Kind k);
};

/// How the constant vector a enters beta in the Klein-type families.
///   Closed:  <a,y> / (1 + <a,x>), the exact 1-form d log(1 + <a,x>).
///   Literal: <a,y> / (1 - |x|^2).  Not closed for a != 0, and the resulting
///            metrics are not projectively flat; kept for comparison.
/// The two agree when a = 0.
enum class KleinOneForm { Closed, Literal };

/// Funk-type Randers metric on the unit ball:
///   alpha = sqrt((1-|x|^2)|y|^2 + <x,y>^2) / (1-|x|^2),
///   beta  = sign (<x,y>/(1-|x|^2) + a-term),  phi = 1 + s.
ABMetric make_randers_klein(int n, const Vec<double>& a_vec, int sign,
                            KleinOneForm form = KleinOneForm::Closed);

/// (alpha + beta)^2 / alpha with alpha, beta above scaled by
/// lambda = (1 + <a,x>)^2 / (1 - |x|^2).
ABMetric make_square_klein(int n, const Vec<double>& a_vec, int sign,
                           KleinOneForm form = KleinOneForm::Closed);

/// lambda(x) of the square-Klein family.
double square_klein_lambda(const Vec<double>& a_vec, const Vec<double>& x);

/// The geometric data of the eta-family: alpha^2 + k beta^2 = eta^(2m/(m-1)) |y|^2
/// and beta = eta y^1.  For k = 0 this is alpha = eta^(m/(m-1)) |y|.
RiemannData eta_family_geometry(int n, double m, double k, const EtaField& eta);

/// F = beta^m (alpha^2 + k beta^2)^((1-m)/2) over eta_family_geometry.
ABMetric make_third_class_eta(int n, double m, double k, const EtaField& eta);

/// rho_i(x) and tau(x) entering the case conditions.
struct ConditionParams {
  std::function<Vec<double>(const Vec<double>&)> rho;
  std::function<double(const Vec<double>&)> tau;

  static ConditionParams zero(int n);
};

struct FirstClassKropina {
  ABMetric metric;
  ConditionParams params;  // rho = (mu beta + s_0) / b^2, tau = -mu / (2 b^2)
  std::function<double(const Vec<double>&)> mu;
};

/// F = k beta + alpha^2 / beta on data satisfying
///   r_00 = 2k beta s_0 + mu (alpha^2 + k beta^2),  s_ij = (b_i s_j - b_j s_i)/b^2,
///   G^i_alpha = rho y^i - r_00 b^i/(2b^2) - (alpha^2 - k beta^2) s^i/(2b^2),
/// with rho = (mu beta + s_0)/b^2.  When mu is empty it is recovered from
/// r_ij b^i b^j = mu b^2 (1 + k b^2).  The constraints are checked at the
/// probe points (and random directions) and a ConstraintViolation is
/// thrown above 1e-8.
FirstClassKropina make_first_class_kropina(const RiemannData& geom, double k,
                                           std::function<double(const Vec<double>&)> mu,
                                           const std::vector<Vec<double>>& probes);

/// mu recovered from the data, see make_first_class_kropina.
double kropina_mu(const RiemannData& geom, double k, const Vec<double>& x);

/// a~ = a / b^2, b~ = b / b^2 (alpha~ = alpha / b, beta~ = beta / b^2).
RiemannData deform_kropina(const RiemannData& g);

/// Normalised power series phi = s^m + sum_j a_{m+2j} s^{m+2j} solving the
/// fourth-class ODE.
struct SeriesSolution {
  double m = 0.0;
  double k = 0.0;
  double b = 1.0;
  std::vector<double> coeffs;  // coeffs[j-1] = a_{m+2j}, j = 1..J

  double eval(double s) const;
};

SeriesSolution series_solve_w51(double m, double k, double b, int J);

/// Displayed closed forms of a_{m+2}, a_{m+4}, a_{m+6}, a_{m+8}.
std::vector<double> series_closed_form_coefficients(double m, double k, double b);

/// Closed-form fourth-class profiles: "w088" (k = 1/b^2, any m),
/// "y088" (m = 2), "y089" (m = 4).
PhiSpec make_phi_closed_form(const std::string& which, double m, double k, double b);

struct TildeForms {
  double F_iii = 0.0;
  double alpha_t_iii = 0.0;
  double beta_t_iii = 0.0;
  double randers_form = 0.0;  // alpha~ + beta~
  double F_iv = 0.0;
  double alpha_t_iv = 0.0;
  double beta_t_iv = 0.0;
  double square_form = 0.0;   // (alpha~ + beta~)^2 / alpha~
};

/// Both sides of the Randers and square-type identifications of the
/// two-dimensional metrics built from b sqrt(alpha^2 - k beta^2) and
/// sqrt(b^2 alpha^2 - beta^2).
TildeForms identify_tilde_forms(double b, double k, double alpha_val, double beta_val);

}  // namespace projflat
