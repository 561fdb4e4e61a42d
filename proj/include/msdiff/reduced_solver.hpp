#pragma once

#include <vector>

#include "msdiff/core_model.hpp"
#include "msdiff/grid.hpp"

namespace msdiff {

/// Face-centered normal fluxes of all n species.
struct FluxSet {
  std::vector<FaceField> J;  // J[0..n-2] = J', J[n-1] = J_n
  /// max over interior faces of |sum_i J_i + alpha grad c_tot|.
  double closure_residual = 0.0;
};

struct ReducedOptions {
  /// Adds -d_t c_tot (as alpha Lap_h c_tot) to every component of the lower
  /// order term. Off by default: the species balance d_t c' + div J' = 0
  /// has no such source, and keeping it breaks agreement with the full
  /// n-species system whenever c_tot is non-uniform.
  bool include_ctot_rate = false;
};

/// r = div_h(B (c' (x) grad T)) + alpha div_h(B (c~' (x) grad c_tot))
/// [- alpha Lap_h c_tot on every component if requested], with B evaluated at
/// faces from arithmetic-mean face states. Propagates NumericallySingular.
std::vector<Field> lower_order_term(const FieldState& state, const Grid& grid,
                                    const MixtureSpec& spec, const ReducedOptions& options = {});

/// Explicit conservative update c' + dt [div_h(T B grad_h c') + r], using
/// T, c_tot and c' from `state`. Returns the advanced c'. Throws
/// CFLViolation when dt exceeds stable_dt / 0.45 and `enforce_cfl` is set.
std::vector<Field> reduced_step_explicit(const FieldState& state, double dt, const Grid& grid,
                                         const MixtureSpec& spec, const ReducedOptions& options = {},
                                         bool enforce_cfl = true);

/// Backward Euler in the diffusion term with T and B lagged at `state`,
/// lower-order term explicit; one sparse direct solve over all species.
/// Throws LinearSolveFailure.
std::vector<Field> reduced_step_semi_implicit(const FieldState& state, double dt, const Grid& grid,
                                              const MixtureSpec& spec,
                                              const ReducedOptions& options = {});

/// 0.45 h_min^2 delta / (2 d T_max) with lambda_max(B) <= 1/delta.
double stable_dt(const FieldState& state, const Grid& grid, const MixtureSpec& spec);

/// J' = -T B grad c' - B c' (x) grad T - alpha B c~' (x) grad c_tot at faces,
/// with the same face evaluation as the stepper, and J_n from the closure
/// sum_i J_i = -alpha grad c_tot.
FluxSet reconstruct_fluxes(const FieldState& state, const Grid& grid, const MixtureSpec& spec);

struct LastSpecies {
  Field c_n;
  double min_value = 0.0;
  int negativity_events = 0;  // cells with c_n < -tol_neg
};

/// c_n = c_tot - sum_i c'_i. Negativity is reported, never clipped.
LastSpecies recover_last_species(const std::vector<Field>& c_prime, const Field& c_tot,
                                 double tol_neg = kTolNeg);

/// Reduced-system diffusion matrix B = F0^{-1} at a single point.
Mat reduced_mobility(const Vec& c_prime, double c_tot, const MixtureSpec& spec);

}  // namespace msdiff
