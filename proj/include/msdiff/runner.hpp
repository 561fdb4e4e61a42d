#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "msdiff/core_model.hpp"
#include "msdiff/verify.hpp"

namespace msdiff {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInvariant = 2,
  kExitNumerical = 3,
};

struct RunFlags {
  /// Overrides output.dir from the config.
  std::optional<std::filesystem::path> out_dir;
  /// Stop with kExitInvariant after the first flagged step.
  bool strict = false;
};

struct RunOutputs {
  std::filesystem::path dir;
  std::vector<std::filesystem::path> snapshots;
  std::filesystem::path diagnostics;
  int exit_status = kExitOk;
  int steps = 0;
  /// Empty on success; otherwise what stopped the run, with step and time.
  std::string message;
};

/// Drives one scenario to t_end. Each step runs the heat step, the chosen
/// temperature update and the reduced step, then the monitors. Writes one
/// snapshot CSV per requested time (snap_t<time>.csv) and diagnostics.csv
/// with a row for t = 0 and one per accepted step. A step that exceeds a
/// hard stability limit is still taken but flagged "cfl:<limit>"; invariant
/// failures are flagged as well, and under `strict` the first flagged row
/// ends the run with kExitInvariant. Solver errors end it with
/// kExitNumerical. Progress and errors go to `log`.
RunOutputs run_scenario(const ScenarioConfig& config, const RunFlags& flags, std::ostream& log);

/// Runs `config` refined by 1, 2, ..., 2^(levels-1) and compares each
/// level with the next finer one restricted to its grid (cell averages).
/// Errors are taken over all n species at t_end. Row k of the table holds
/// the error between levels k and k+1.
ConvergenceTable run_convergence(const ScenarioConfig& config, int levels, std::ostream& log);

/// Writes dx,dt,error_linf,error_l2,order.
void write_convergence_csv(const ConvergenceTable& table, const std::filesystem::path& path);

}  // namespace msdiff
