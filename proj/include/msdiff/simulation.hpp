#pragma once

#include <string>
#include <vector>

#include "msdiff/core_model.hpp"
#include "msdiff/decoupled_solver.hpp"
#include "msdiff/reduced_solver.hpp"

namespace msdiff {

/// Step-size limits for the current state; infinity when a limit does not apply.
struct StepLimits {
  double heat = 0.0;       // explicit heat hard limit
  double reduced = 0.0;    // explicit reduced hard limit (stable_dt / 0.45)
  double advective = 0.0;  // upwind transport limit
  /// Step chosen by the adaptive policy before the safety factor.
  double recommended = 0.0;
};

/// Owns the evolving state of one scenario and advances it one step at a
/// time: heat step for c_tot, then the temperature update, then the reduced
/// step for c'. All three updates read the state at the start of the step.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config, ReducedOptions options = {});

  const ScenarioConfig& config() const { return config_; }
  const FieldState& state() const { return state_; }
  const Grid& grid() const { return config_.grid; }
  const MixtureSpec& mixture() const { return config_.mixture; }
  const CtotHistory& history() const { return history_; }

  StepLimits limits() const;

  /// Fixed dt if configured, else cfl_safety * limits().recommended.
  double policy_dt() const;

  /// Names of the hard limits that `dt` exceeds ("heat", "reduced", "advective").
  std::vector<std::string> cfl_violations(double dt) const;

  /// Advances by dt. With enforce_cfl, exceeding a hard limit throws
  /// Error(CFLViolation) before anything changes; otherwise the step is
  /// taken regardless. After any other error the simulation is unusable.
  void step(double dt, bool enforce_cfl = true);

 private:
  ScenarioConfig config_;
  ReducedOptions options_;
  FieldState state_;
  Field T_in_;
  CtotHistory history_;
};

}  // namespace msdiff
