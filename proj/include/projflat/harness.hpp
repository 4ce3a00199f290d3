#pragma once

// Configuration-driven verification suites: sampling, orchestration and
// report emission.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "projflat/abmetric.hpp"
#include "projflat/catalog.hpp"
#include "projflat/conditions.hpp"

namespace projflat {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kEngineVersion = "1.0.0";

/// Default tolerance of each residual class.
const std::map<std::string, double>& default_tolerances();

struct SuiteConfig {
  std::string suite;
  int dim = 2;
  int samples = 200;
  std::uint64_t seed = 1;
  std::map<std::string, double> tol;  // overrides of default_tolerances()
  std::optional<std::pair<double, double>> box;  // x^i in [lo, hi]

  // Metric parameters.  Unset sweep lists fall back to each suite's defaults.
  std::vector<double> m;
  std::vector<double> k;
  std::vector<Vec<double>> a_vec;
  std::vector<int> sign;
  EtaField eta;
  std::optional<int> draws;  // parameter draws for ode-series / tilde-forms
  double k1 = 1.0;
  double k2 = 0.5;

  double tolerance(const std::string& cls) const;
};

/// Strict parse: unknown keys and ill-typed values raise ConfigError.
SuiteConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const SuiteConfig& c);
/// "class=value" from the command line.
void apply_tol_override(SuiteConfig& c, const std::string& assignment);
/// Range and registry checks; raises ConfigError.
void validate_config(const SuiteConfig& c);

/// Every policy also requires F > 0 and
///   phi - s phi' + (b^2 - s^2) phi'' >= kRegularityMargin * phi.
/// Where this quantity vanishes the fundamental tensor degenerates, and
/// third y-derivatives of the spray lose about one digit per 1e-1 of margin.
inline constexpr double kRegularityMargin = 0.2;

enum class SamplePolicy {
  Regular,           // F > 0
  PositiveSingular,  // s >= 0.1 b (singular at beta = 0)
  FourthClass,       // 0.05 b <= s <= 0.95 b
};

/// Uniform x in the box, y uniform on [-1, 1]^n with |y| >= 0.1, filtered by
/// the policy.  `stream` separates independent draws under one seed.
std::vector<Sample> sample_domain(const SuiteConfig& c, const ABMetric& M, SamplePolicy policy,
                                  std::uint64_t stream = 0);

enum class Bound { Upper, Lower };

struct CheckResult {
  std::string name;
  std::string eq;
  std::string tol_class;
  double tol = 0.0;
  Bound bound = Bound::Upper;  // Lower: pass iff max_residual >= tol
  double max_residual = 0.0;
  double mean_residual = 0.0;
  int samples = 0;
  std::vector<std::string> incidents;
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  nlohmann::json config;
  std::vector<CheckResult> checks;
  bool pass = true;
  double runtime_ms = 0.0;
  std::string engine_version = kEngineVersion;
};

struct SuiteInfo {
  std::string id;
  std::string summary;
  std::string explain;
};

const std::vector<SuiteInfo>& registered_suites();
const SuiteInfo& suite_info(const std::string& id);

/// Residual failures are reported, never thrown; configuration problems
/// raise ConfigError.
SuiteReport run_suite(const SuiteConfig& c);

enum class ReportFormat { Text, Json };

nlohmann::json report_to_json(const SuiteReport& r);
SuiteReport report_from_json(const nlohmann::json& j);
std::string emit_report(const SuiteReport& r, ReportFormat fmt);
/// Writes to `path`, or to stdout when path is empty or "-".
void write_report(const SuiteReport& r, ReportFormat fmt, const std::string& path);

}  // namespace projflat
