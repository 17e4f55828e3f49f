#include <charconv>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "obsvkit/errors.hpp"
#include "obsvkit/report.hpp"

namespace {

std::uint64_t default_seed() {
  const char* env = std::getenv("OBSVKIT_SEED");
  if (env == nullptr || *env == '\0') return 1;
  std::uint64_t value = 0;
  const char* end = env + std::string(env).size();
  const auto [ptr, ec] = std::from_chars(env, end, value);
  if (ec != std::errc() || ptr != end) {
    throw obsvkit::InvalidConfig("OBSVKIT_SEED must be an unsigned integer, got '" +
                                 std::string(env) + "'");
  }
  return value;
}

void print_checks(const nlohmann::json& checks, const std::string& indent) {
  for (const auto& c : checks) {
    std::cout << indent << (c.at("pass").get<bool>() ? "[PASS] " : "[FAIL] ")
              << c.at("name").get<std::string>() << "  value=" << c.at("value").dump()
              << " bound=" << c.at("bound").dump() << "\n";
  }
}

void print_report(const nlohmann::json& report) {
  if (report.contains("trials")) {
    for (const auto& trial : report.at("trials")) {
      std::cout << "trial seed=" << trial.at("seed").get<std::uint64_t>()
                << (trial.value("informational", false) ? " (informational)" : "") << "\n";
      print_checks(trial.at("structure").at("checks"), "  ");
      if (trial.contains("degeneracy_probe")) {
        const auto& p = trial.at("degeneracy_probe");
        std::cout << "  degeneracy probe: full null " << p.at("full_null_dim").get<int>()
                  << ", reduced null " << p.at("reduced_null_dim").get<int>()
                  << " (baseline " << p.at("baseline_reduced_null_dim").get<int>() << ")"
                  << (p.at("discriminates").get<bool>() ? "  <- rank drop detected" : "")
                  << "\n";
      }
    }
  }
  if (report.contains("checks")) print_checks(report.at("checks"), "");
  const auto& summary = report.at("summary");
  std::cout << (summary.at("all_passed").get<bool>() ? "ALL CHECKS PASSED"
                                                     : "SOME CHECKS FAILED")
            << "\n";
}

int emit(const obsvkit::RunResult& result, const std::string& out_path) {
  print_report(result.report);
  if (!out_path.empty()) {
    obsvkit::write_json_atomic(out_path, result.report);
    std::cout << "report written to " << out_path << "\n";
  }
  return result.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verification of aided-INS observability structure"};
  app.require_subcommand(1);

  obsvkit::AnalyzeConfig acfg;
  obsvkit::VerifyConfig vcfg;
  std::string analyze_mode = "vins";
  std::string analyze_degeneracy = "none";

  try {
    acfg.seed = default_seed();
    vcfg.seed = acfg.seed;
  } catch (const obsvkit::InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App* analyze =
      app.add_subcommand("analyze", "sample scenarios and verify the nullspace structure");
  analyze->add_option("--system", analyze_mode, "system type: vins | lins")
      ->check(CLI::IsMember({"vins", "lins"}))
      ->capture_default_str();
  analyze->add_option("--features", acfg.features, "number of landmark features")
      ->capture_default_str();
  analyze->add_option("--trials", acfg.trials, "number of sampled scenarios")
      ->capture_default_str();
  analyze->add_option("--seed", acfg.seed, "base seed (default from OBSVKIT_SEED)")
      ->capture_default_str();
  analyze
      ->add_option("--degeneracy", analyze_degeneracy,
                   "feature geometry stress: none | collinear | near_zero_depth")
      ->check(CLI::IsMember({"none", "collinear", "near_zero_depth"}))
      ->capture_default_str();
  analyze->add_option("--rank-tol", acfg.tol.rank_tol, "relative singular value cutoff")
      ->capture_default_str();
  analyze->add_option("--check-tol", acfg.tol.check_tol, "residual bound for identities")
      ->capture_default_str();
  analyze->add_option("--gap-tol", acfg.tol.gap_tol, "principal angle bound")
      ->capture_default_str();
  analyze->add_option("--threads", acfg.threads, "OpenMP thread count (0 = default)")
      ->capture_default_str();
  analyze->add_option("--out", acfg.out_path, "write the JSON report here");

  CLI::App* verify = app.add_subcommand("verify", "run a focused verification battery");
  verify
      ->add_option("battery", vcfg.what,
                   "battery: gradients | identities | brackets | flow")
      ->required()
      ->check(CLI::IsMember({"gradients", "identities", "brackets", "flow"}));
  verify->add_option("--trials", vcfg.trials, "number of sampled states")
      ->capture_default_str();
  verify->add_option("--seed", vcfg.seed, "base seed (default from OBSVKIT_SEED)")
      ->capture_default_str();
  verify->add_option("--duration", vcfg.duration, "total flow duration in seconds")
      ->capture_default_str();
  verify->add_option("--dt", vcfg.dt, "integrator step")->capture_default_str();
  verify->add_option("--out", vcfg.out_path, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) {
      acfg.mode = obsvkit::mode_from_name(analyze_mode);
      acfg.degeneracy = obsvkit::degeneracy_from_name(analyze_degeneracy);
      return emit(obsvkit::run_analyze(acfg), acfg.out_path);
    }
    return emit(obsvkit::run_verify(vcfg), vcfg.out_path);
  } catch (const obsvkit::InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
