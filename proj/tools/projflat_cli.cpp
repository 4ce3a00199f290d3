// projflat: run verification suites from the command line.
//
//   projflat verify --suite randers-klein --dim 3 --report json
//   projflat list-suites
//   projflat explain --suite conditions
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "projflat/harness.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw projflat::ConfigError("cannot open config file '" + path + "'");
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw projflat::ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of projectively flat (alpha, beta)-metrics"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run one suite and report its checks");
  std::string suite;
  std::string config_path;
  std::optional<int> dim;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> tols;
  std::string report = "text";
  std::string out;
  verify->add_option("--suite", suite, "suite id (see list-suites)");
  verify->add_option("--config", config_path, "JSON config file; flags override its values");
  verify->add_option("--dim", dim, "dimension n");
  verify->add_option("--samples", samples, "number of sample points");
  verify->add_option("--seed", seed, "RNG seed");
  verify->add_option("--tol", tols, "tolerance override class=value (repeatable)")->take_all();
  verify->add_option("--report", report, "report format")->check(CLI::IsMember({"text", "json"}));
  verify->add_option("--out", out, "write the report here instead of stdout");

  app.add_subcommand("list-suites", "list registered suites");

  auto* explain = app.add_subcommand("explain", "describe what a suite checks");
  std::string explain_suite;
  explain->add_option("--suite", explain_suite, "suite id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (app.got_subcommand("list-suites")) {
      for (const auto& s : projflat::registered_suites()) {
        std::cout << s.id << "\t" << s.summary << "\n";
      }
      return 0;
    }
    if (app.got_subcommand("explain")) {
      const auto& info = projflat::suite_info(explain_suite);
      std::cout << info.id << ": " << info.summary << "\n\n" << info.explain << "\n";
      return 0;
    }

    projflat::SuiteConfig cfg;
    if (!config_path.empty()) {
      cfg = projflat::parse_config(load_json(config_path));
    }
    if (!suite.empty()) cfg.suite = suite;
    if (dim) cfg.dim = *dim;
    if (samples) cfg.samples = *samples;
    if (seed) cfg.seed = *seed;
    for (const auto& t : tols) {
      projflat::apply_tol_override(cfg, t);
    }
    if (cfg.suite.empty()) {
      throw projflat::ConfigError("no suite given (use --suite or a config file)");
    }

    const projflat::SuiteReport r = projflat::run_suite(cfg);
    projflat::write_report(r, report == "json" ? projflat::ReportFormat::Json : projflat::ReportFormat::Text, out);
    return r.pass ? 0 : kExitFail;
  } catch (const projflat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
