#pragma once

#include <cstddef>
#include <deque>
#include <span>

#include "msdiff/grid.hpp"

namespace msdiff {

enum class HeatScheme { Explicit, Implicit };

/// Largest stable explicit step for the heat equation: h_min^2 / (2 d alpha).
double heat_dt_limit(double alpha, const Grid& grid);

/// Default explicit heat step: 0.45 of heat_dt_limit.
double heat_stable_dt(double alpha, const Grid& grid);

/// One step of d_t c = alpha Lap c with homogeneous Neumann walls.
/// Explicit Euler uses compact conservative face fluxes; implicit Euler
/// solves the same operator directly. Throws CFLViolation when the
/// explicit step exceeds heat_dt_limit and `enforce_cfl` is set.
Field heat_step(const Field& c_tot, double dt, double alpha, const Grid& grid,
                HeatScheme scheme = HeatScheme::Explicit, bool enforce_cfl = true);

/// d_t log c_tot evaluated as alpha Lap_h c_tot / c_tot.
Field dt_log_ctot(const Field& c_tot, double alpha, const Grid& grid);

/// V = -(5 alpha / 3) grad log c_tot, stored as face normal components.
/// Boundary faces carry exactly zero normal velocity.
struct VelocityField {
  FaceField faces;

  /// Cell-centered component along `axis` (mean of the two bounding faces).
  Field cell_component(const Grid& grid, int axis) const;
  double max_abs() const;
};

VelocityField advection_velocity(const Field& c_tot, double alpha, const Grid& grid);

/// Largest upwind step with dt * sum_a max|V_a| / h_a <= 0.9.
double advective_dt_limit(const VelocityField& V, const Grid& grid);

/// First-order donor-cell transport of T by V plus the explicit source
/// (2/3) s T. Throws CFLViolation when the advective limit is exceeded and
/// `enforce_cfl` is set.
Field temperature_step_upwind(const Field& T, const VelocityField& V, const Field& s, double dt,
                              const Grid& grid, bool enforce_cfl = true);

/// Time-ordered snapshots of c_tot, one per accepted step.
class CtotHistory {
 public:
  /// `capacity` == 0 keeps every snapshot; otherwise the oldest are dropped.
  explicit CtotHistory(std::size_t capacity = 0) : capacity_(capacity) {}

  /// Throws Error(ValidationError) unless t is strictly greater than the last time.
  void push(double t, Field c_tot);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double time(std::size_t k) const { return times_[k]; }
  const Field& snapshot(std::size_t k) const { return fields_[k]; }

 private:
  std::size_t capacity_;
  std::deque<double> times_;
  std::deque<Field> fields_;
};

/// Evaluates T(t_query, x) at every cell center via the explicit solution
/// along characteristics:
///   T(t, x) = T_in(X(0; t, x)) exp((2/3) int_0^t d_t log c_tot(s, X(s; t, x)) ds),
/// tracing the backward flow of V with RK2 (V bilinear in space, linear in
/// time between snapshots) and accumulating the exponent by the trapezoid
/// rule. The history must start at t = 0 and reach t_query.
/// Throws TrajectoryExit if a trajectory leaves the box by more than a cell.
Field temperature_characteristics(const Field& T_in, const CtotHistory& history, double t_query,
                                  double alpha, const Grid& grid);

}  // namespace msdiff
