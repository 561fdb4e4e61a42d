#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "msdiff/core_model.hpp"
#include "msdiff/grid.hpp"
#include "msdiff/reduced_solver.hpp"

namespace msdiff {

/// How the full-system oracle approximates D = grad(c_i T) at a face.
enum class OracleStencil {
  /// (c_i T)_R - (c_i T)_L over h: the same face data the reduced path sees.
  Compact,
  /// Mean of the two adjacent centered cell gradients: an independent
  /// second-order discretization of the same operator.
  Wide,
};

struct OracleStep {
  std::vector<Field> c;  // all n species after the step
  FluxSet fluxes;
};

/// Steps the original n-species system directly. At every interior face:
/// builds F from face concentrations and D from grad(c_i T), completes the
/// n-th row from the linear dependence of the flux-gradient relations,
/// forms D~ = D + F A with A = alpha grad c_tot e_n, solves F J~ = D~ on
/// span{1}^perp, sets J = J~ - A, and updates each c_i conservatively.
/// Throws IncompatibleRHS when a face's D~ is not orthogonal to 1.
OracleStep full_system_step_oracle(const std::vector<Field>& c, const Field& T, const Field& c_tot,
                                   double dt, const Grid& grid, const MixtureSpec& spec,
                                   OracleStencil stencil = OracleStencil::Wide);

/// One row per accepted step.
struct DiagnosticsRow {
  double t = 0.0;
  double dt = 0.0;
  std::vector<double> mass;  // n species
  double ctot_min = 0.0;
  double ctot_max = 0.0;
  double T_min = 0.0;
  double T_max = 0.0;
  double min_re_eig_TB = 0.0;
  double flux_residual = 0.0;
  double closure_residual = 0.0;
  int neg_events = 0;
  std::vector<std::string> flags;
};

class Diagnostics {
 public:
  /// Throws ValidationError unless row.t exceeds the previous row's time.
  void append(DiagnosticsRow row);
  std::span<const DiagnosticsRow> rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

 private:
  std::vector<DiagnosticsRow> rows_;
};

struct FluxResidual {
  /// max_faces ||F J - D||_inf / scale over interior faces, D_n completed
  /// from the linear dependence of the flux-gradient relations.
  double flux_gradient = 0.0;
  /// max_faces |sum_i J_i + alpha grad c_tot| / scale.
  double closure = 0.0;
  /// max_faces |grad_h(c_tot T)| / scale: how far the raw n-th relation is
  /// from being implied by the first n-1 (zero iff c_tot T is uniform).
  double compatibility = 0.0;
};

FluxResidual flux_gradient_residual(const FluxSet& fluxes, const FieldState& state,
                                    const Grid& grid, const MixtureSpec& spec);

/// Smallest real part of an eigenvalue of T B over all cells.
double ellipticity_monitor(const FieldState& state, const Grid& grid, const MixtureSpec& spec);

/// max over time of |m_i(t) - m_i(0)| / |m_i(0)| for every species.
std::vector<double> mass_drift(std::span<const DiagnosticsRow> rows);

struct MaxPrincipleReport {
  bool pass = true;
  double worst_excursion = 0.0;
};

/// Largest excursion of c_tot outside [c_min, c_max]; passes at <= tol.
MaxPrincipleReport max_principle_report(std::span<const DiagnosticsRow> rows, const Bounds& bounds,
                                        double tol = 1e-12);

/// Observer: computes one diagnostics row without touching the state.
DiagnosticsRow compute_diagnostics(const FieldState& state, double dt, const Grid& grid,
                                   const MixtureSpec& spec);

struct ConvergenceRow {
  double dx = 0.0;
  double dt = 0.0;
  double error_linf = 0.0;
  double error_l2 = 0.0;
  double order = 0.0;  // log2(e_prev / e_this); NaN for the first row
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;

  double min_order() const;
};

struct LevelError {
  double dx = 0.0;
  double dt = 0.0;
  double error_linf = 0.0;
  double error_l2 = 0.0;
};

/// Runs `level(k)` for k = 0..levels-1 (coarse to fine) and fills in the
/// observed orders from consecutive L-infinity errors.
ConvergenceTable convergence_order(const std::function<LevelError(int)>& level, int levels);

}  // namespace msdiff
