#include "msdiff/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msdiff/errors.hpp"

namespace msdiff {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Semi-implicit runs may exceed the explicit reduced limit by this factor.
constexpr double kSemiImplicitStretch = 10.0;
}  // namespace

Simulation::Simulation(ScenarioConfig config, ReducedOptions options)
    : config_(std::move(config)), options_(options), state_(build_initial_state(config_)) {
  T_in_ = state_.T;
  if (config_.temperature_scheme == TemperatureScheme::Characteristics)
    history_.push(0.0, state_.c_tot);
}

StepLimits Simulation::limits() const {
  const double alpha = config_.mixture.alpha;
  const bool semi = config_.concentration_scheme == ConcentrationScheme::SemiImplicit;
  StepLimits lim;
  lim.heat = semi ? kInf : heat_dt_limit(alpha, grid());
  lim.reduced = semi ? kInf : stable_dt(state_, grid(), mixture()) / 0.45;
  lim.advective = kInf;
  if (config_.temperature_scheme == TemperatureScheme::Upwind)
    lim.advective = advective_dt_limit(advection_velocity(state_.c_tot, alpha, grid()), grid());

  if (semi) {
    lim.recommended = std::min(kSemiImplicitStretch * stable_dt(state_, grid(), mixture()),
                               lim.advective);
  } else {
    lim.recommended = std::min({heat_stable_dt(alpha, grid()), stable_dt(state_, grid(), mixture()),
                                lim.advective});
  }
  return lim;
}

double Simulation::policy_dt() const {
  if (config_.time.fixed_dt) return *config_.time.fixed_dt;
  return config_.time.cfl_safety * limits().recommended;
}

std::vector<std::string> Simulation::cfl_violations(double dt) const {
  const StepLimits lim = limits();
  const double slack = 1.0 + 1e-12;
  std::vector<std::string> out;
  if (dt > lim.heat * slack) out.emplace_back("heat");
  if (dt > lim.reduced * slack) out.emplace_back("reduced");
  if (dt > lim.advective * slack) out.emplace_back("advective");
  return out;
}

void Simulation::step(double dt, bool enforce_cfl) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw Error(ErrorKind::ValidationError, "time step must be positive and finite");
  const Grid& g = grid();
  const MixtureSpec& spec = mixture();
  const bool semi = config_.concentration_scheme == ConcentrationScheme::SemiImplicit;
  if (enforce_cfl) {
    const auto violated = cfl_violations(dt);
    if (!violated.empty())
      throw Error(ErrorKind::CFLViolation,
                  "dt = " + std::to_string(dt) + " exceeds the " + violated.front() + " limit");
  }

  Field c_tot_next = heat_step(state_.c_tot, dt, spec.alpha, g,
                               semi ? HeatScheme::Implicit : HeatScheme::Explicit, enforce_cfl);
  const double t_next = state_.t + dt;

  Field T_next;
  if (config_.temperature_scheme == TemperatureScheme::Upwind) {
    const VelocityField V = advection_velocity(state_.c_tot, spec.alpha, g);
    const Field s = dt_log_ctot(state_.c_tot, spec.alpha, g);
    T_next = temperature_step_upwind(state_.T, V, s, dt, g, enforce_cfl);
  } else {
    history_.push(t_next, c_tot_next);
    T_next = temperature_characteristics(T_in_, history_, t_next, spec.alpha, g);
  }

  std::vector<Field> c_prime_next =
      semi ? reduced_step_semi_implicit(state_, dt, g, spec, options_)
           : reduced_step_explicit(state_, dt, g, spec, options_, enforce_cfl);

  state_.t = t_next;
  state_.c_prime = std::move(c_prime_next);
  state_.c_tot = std::move(c_tot_next);
  state_.T = std::move(T_next);
}

}  // namespace msdiff
