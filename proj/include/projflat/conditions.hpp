#pragma once

// Residual checkers for the projective-flatness cases of (alpha, beta)-metrics
// with singular phi, plus the flat-parallel case.  rho and tau are inputs;
// the estimators below are a convenience and their output is re-verified by
// the same checkers.

#include <optional>
#include <string>
#include <vector>

#include "projflat/abmetric.hpp"
#include "projflat/catalog.hpp"
#include "projflat/riemann.hpp"

namespace projflat {

struct Sample {
  Vec<double> x;
  Vec<double> y;
};

struct CheckTolerance {
  double equation = 1e-8;
  double curvature = 1e-5;
};

/// Adds `amount` to every component of the right-hand side of the equation
/// with the given tag.  Used to confirm that checkers detect a broken
/// equality.
struct Perturbation {
  std::string tag;
  double amount = 0.1;
};

struct ResidualEntry {
  std::string tag;
  std::string eq;  // human-readable form of the equation
  double max = 0.0;
  double sum = 0.0;
  int count = 0;
  double tol = 0.0;

  double mean() const { return count > 0 ? sum / count : 0.0; }
  bool pass() const { return max <= tol; }
};

struct CaseResiduals {
  std::vector<ResidualEntry> entries;
  std::vector<std::string> incidents;  // per-sample evaluation failures

  bool pass() const;
  /// Max residual of the entry, or throws std::out_of_range.
  double residual(const std::string& tag) const;
  bool has(const std::string& tag) const;
  const ResidualEntry& entry(const std::string& tag) const;
  void record(const std::string& tag, const std::string& eq, double value, double tol);
};

/// Raised for case (v) with k1 = k2^2, which reduces to the third class with m = -3.
class ReducibleCaseError : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

enum class Case { I, II, III, IV, V };

struct CaseConstants {
  double m = 2.0;
  double k = 0.0;
  double a1 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
};

CaseResiduals check_flat_parallel(const RiemannData& g, const std::vector<Sample>& samples,
                                  CheckTolerance tol = {},
                                  const std::optional<Perturbation>& perturb = std::nullopt);

/// phi = ks + 1/s.  On passing data where additionally
/// r_00 = 2k beta s_0 + mu (alpha^2 + k beta^2) holds, the flag curvature and
/// the cubic part of the spray are checked as well.
CaseResiduals check_case_i(const RiemannData& g, double k, const ConditionParams& params,
                           const std::vector<Sample>& samples, CheckTolerance tol = {},
                           const std::optional<Perturbation>& perturb = std::nullopt);

CaseResiduals check_case_ii(const RiemannData& g, double m, double k, double a1,
                            const ConditionParams& params, const std::vector<Sample>& samples,
                            CheckTolerance tol = {},
                            const std::optional<Perturbation>& perturb = std::nullopt);

/// phi = s^m (1 + k s^2)^((1-m)/2).  Passing data also gets K = 0 and
/// quadratic-spray checks.
CaseResiduals check_case_iii(const RiemannData& g, double m, double k, const ConditionParams& params,
                             const std::vector<Sample>& samples, CheckTolerance tol = {},
                             const std::optional<Perturbation>& perturb = std::nullopt);

/// n = 2 only; phi from the quadrature with b = |b| at the first sample.
CaseResiduals check_case_iv(const RiemannData& g, double m, double k, const ConditionParams& params,
                            const std::vector<Sample>& samples, CheckTolerance tol = {},
                            const std::optional<Perturbation>& perturb = std::nullopt);

/// n = 2 only; throws ReducibleCaseError when k1 = k2^2.
CaseResiduals check_case_v(const RiemannData& g, double k1, double k2, const ConditionParams& params,
                           const std::vector<Sample>& samples, CheckTolerance tol = {},
                           const std::optional<Perturbation>& perturb = std::nullopt);

/// tau from the r_ij equation contracted with b^i b^j, rho from the G_alpha
/// equation evaluated along coordinate axes.  Case I has no tau; its rho
/// comes from mu recovered as in kropina_mu.
ConditionParams estimate_params(Case c, const RiemannData& g, const CaseConstants& cc);

/// rho_i(x) + delta * dx^axis, tau unchanged.
ConditionParams shift_rho(const ConditionParams& p, int axis, double delta);

}  // namespace projflat
