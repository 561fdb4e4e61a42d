#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "msdiff/config.hpp"
#include "msdiff/errors.hpp"
#include "msdiff/runner.hpp"
#include "msdiff/verify_suites.hpp"

namespace {

using nlohmann::json;

json to_json(const msdiff::ConvergenceTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows)
    rows.push_back({{"dx", r.dx},
                    {"dt", r.dt},
                    {"error_linf", r.error_linf},
                    {"error_l2", r.error_l2},
                    {"order", std::isnan(r.order) ? json(nullptr) : json(r.order)}});
  return rows;
}

json to_json(const msdiff::SuiteResult& suite) {
  json checks = json::array();
  for (const auto& c : suite.checks)
    checks.push_back({{"name", c.name},
                      {"value", c.value},
                      {"limit", c.limit},
                      {"sense", c.sense == msdiff::Check::Sense::AtMost ? "at_most" : "at_least"},
                      {"pass", c.pass()}});
  json tables = json::object();
  for (const auto& [name, table] : suite.tables) tables[name] = to_json(table);
  return {{"suite", suite.name},
          {"pass", suite.pass()},
          {"seconds", suite.seconds},
          {"checks", checks},
          {"tables", tables}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-isothermal multicomponent diffusion simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool strict = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write snapshots and diagnostics");
  run->add_option("--config", config_path, "Scenario JSON file")->required();
  run->add_option("--out-dir", out_dir, "Output directory (overrides output.dir)");
  run->add_flag("--strict", strict, "Stop with exit code 2 at the first flagged step");

  std::string suite;
  std::uint64_t seed = 0;
  int samples = 1000;
  auto* verify = app.add_subcommand("verify", "Run a verification suite and print a JSON summary");
  verify->add_option("suite", suite, "spectra | conjugation | equivalence | convergence | all")
      ->required();
  verify->add_option("--seed", seed, "Seed for the random samplers");
  verify->add_option("--samples", samples, "Number of random samples")
      ->check(CLI::PositiveNumber);

  int levels = 3;
  auto* converge = app.add_subcommand("converge", "Refinement study of a scenario");
  converge->add_option("--config", config_path, "Scenario JSON file")->required();
  converge->add_option("--levels", levels, "Number of grid levels (>= 2)")
      ->check(CLI::Range(2, 12));
  converge->add_option("--out-dir", out_dir, "Output directory (overrides output.dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? msdiff::kExitOk : msdiff::kExitUsage;
  }

  msdiff::ScenarioConfig config;
  if (*run || *converge) {
    try {
      config = msdiff::load_config(config_path);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return msdiff::kExitUsage;
    }
  }

  try {
    if (*run) {
      msdiff::RunFlags flags;
      if (!out_dir.empty()) flags.out_dir = out_dir;
      flags.strict = strict;
      return msdiff::run_scenario(config, flags, std::cerr).exit_status;
    }
    if (*verify) {
      std::vector<msdiff::SuiteResult> results;
      try {
        results = msdiff::run_named_suite(suite, seed, samples);
      } catch (const msdiff::Error& e) {
        if (e.kind() != msdiff::ErrorKind::ValidationError || e.field() != "suite") throw;
        std::cerr << e.what() << "\n" << verify->help();
        return msdiff::kExitUsage;
      }
      json report = {{"seed", seed}, {"samples", samples}, {"suites", json::array()}};
      bool pass = true;
      for (const auto& r : results) {
        report["suites"].push_back(to_json(r));
        pass = pass && r.pass();
      }
      report["pass"] = pass;
      std::cout << report.dump(2) << '\n';
      return pass ? msdiff::kExitOk : msdiff::kExitInvariant;
    }
    const std::filesystem::path dir = out_dir.empty() ? config.output.dir : out_dir;
    const auto table = msdiff::run_convergence(config, levels, std::cerr);
    std::filesystem::create_directories(dir);
    msdiff::write_convergence_csv(table, dir / "convergence.csv");
    std::cout << to_json(table).dump(2) << '\n';
    return msdiff::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return msdiff::kExitNumerical;
  }
}
