#include "msdiff/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "msdiff/errors.hpp"
#include "msdiff/ms_algebra.hpp"

namespace msdiff {

OracleStep full_system_step_oracle(const std::vector<Field>& c, const Field& T, const Field& c_tot,
                                   double dt, const Grid& grid, const MixtureSpec& spec,
                                   OracleStencil stencil) {
  const int n = spec.n;
  if (static_cast<int>(c.size()) != n)
    throw Error(ErrorKind::DimensionMismatch, "oracle needs all n species");
  const int N = grid.num_cells();

  std::vector<Field> cT(n, Field(N));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < N; ++k) cT[i][k] = c[i][k] * T[k];

  // wide[axis][i]: centered cell gradients of c_i T
  std::array<std::vector<Field>, 2> wide;
  if (stencil == OracleStencil::Wide)
    for (int axis = 0; axis < grid.dim(); ++axis)
      for (int i = 0; i < n; ++i) wide[axis].push_back(cell_gradient(grid, cT[i], axis));

  OracleStep out;
  out.fluxes.J.assign(n, FaceField::zeros(grid));
  const double inv_h[2] = {1.0 / grid.spacing(0), 1.0 / grid.spacing(1)};
  Vec c_face(n);
  Mat D_tilde(n, 1);
  double closure = 0.0;

  grid.for_each_interior_face([&](int axis, int face, int l, int r) {
    for (int i = 0; i < n; ++i) c_face(i) = 0.5 * (c[i][l] + c[i][r]);
    const Mat F = build_F(c_face, spec);

    double dependent = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      const double Di = stencil == OracleStencil::Compact
                            ? (cT[i][r] - cT[i][l]) * inv_h[axis]
                            : 0.5 * (wide[axis][i][l] + wide[axis][i][r]);
      D_tilde(i, 0) = Di;
      dependent -= Di;
    }
    D_tilde(n - 1, 0) = dependent;

    // J~ = J + A, A = alpha grad c_tot on the last row only
    const double a_n = spec.alpha * (c_tot[r] - c_tot[l]) * inv_h[axis];
    D_tilde.col(0) += F.col(n - 1) * a_n;

    const Mat J_tilde = constrained_flux_solve(D_tilde, F);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double Ji = J_tilde(i, 0) - (i == n - 1 ? a_n : 0.0);
      out.fluxes.J[i].normal[axis][face] = Ji;
      sum += Ji;
    }
    closure = std::max(closure, std::abs(sum + a_n));
  });
  out.fluxes.closure_residual = closure;

  out.c = c;
  for (int i = 0; i < n; ++i) {
    const Field div = divergence(grid, out.fluxes.J[i]);
    for (int k = 0; k < N; ++k) out.c[i][k] -= dt * div[k];
  }
  return out;
}

void Diagnostics::append(DiagnosticsRow row) {
  if (!rows_.empty() && !(row.t > rows_.back().t))
    throw Error(ErrorKind::ValidationError, "diagnostics times must be strictly increasing");
  rows_.push_back(std::move(row));
}

FluxResidual flux_gradient_residual(const FluxSet& fluxes, const FieldState& state,
                                    const Grid& grid, const MixtureSpec& spec) {
  const int n = spec.n;
  if (static_cast<int>(fluxes.J.size()) != n)
    throw Error(ErrorKind::DimensionMismatch, "flux set must hold all n species");
  const LastSpecies last = recover_last_species(state.c_prime, state.c_tot);
  auto species = [&](int i) -> const Field& { return i < n - 1 ? state.c_prime[i] : last.c_n; };

  const double inv_h[2] = {1.0 / grid.spacing(0), 1.0 / grid.spacing(1)};
  double res = 0.0, res_scale = 0.0;
  double closure = 0.0, closure_scale = 0.0;
  double compat = 0.0;
  Vec c_face(n), J(n), D(n);
  grid.for_each_interior_face([&](int axis, int face, int l, int r) {
    for (int i = 0; i < n; ++i) {
      c_face(i) = 0.5 * (species(i)[l] + species(i)[r]);
      J(i) = fluxes.J[i].normal[axis][face];
    }
    double dependent = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      D(i) = (species(i)[r] * state.T[r] - species(i)[l] * state.T[l]) * inv_h[axis];
      dependent -= D(i);
    }
    D(n - 1) = dependent;
    const Mat F = build_F(c_face, spec);
    const Vec FJ = F * J;
    res = std::max(res, (FJ - D).cwiseAbs().maxCoeff());
    res_scale = std::max({res_scale, D.cwiseAbs().maxCoeff(), FJ.cwiseAbs().maxCoeff()});

    const double closure_flux = spec.alpha * (state.c_tot[r] - state.c_tot[l]) * inv_h[axis];
    closure = std::max(closure, std::abs(J.sum() + closure_flux));
    closure_scale = std::max({closure_scale, std::abs(closure_flux), J.cwiseAbs().maxCoeff()});

    compat = std::max(compat, std::abs(state.c_tot[r] * state.T[r] - state.c_tot[l] * state.T[l]) *
                                  inv_h[axis]);
  });
  FluxResidual out;
  if (res_scale > 0.0) {
    out.flux_gradient = res / res_scale;
    out.compatibility = compat / res_scale;
  }
  if (closure_scale > 0.0) out.closure = closure / closure_scale;
  return out;
}

namespace {

// Smallest Re(1/lambda) over eigenvalues lambda of F0.
double min_re_inverse_eig(const Mat& F0) {
  const auto m = F0.rows();
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](std::complex<double> lambda) {
    const double mag2 = std::norm(lambda);
    if (!(mag2 > 0.0)) throw Error(ErrorKind::NumericallySingular, "F0 has a zero eigenvalue");
    best = std::min(best, lambda.real() / mag2);
  };
  if (m == 1) {
    consider(F0(0, 0));
  } else {
    Eigen::EigenSolver<Mat> solver(F0, false);
    if (solver.info() != Eigen::Success)
      throw Error(ErrorKind::EigenFailure, "F0 eigenvalues did not converge");
    for (Eigen::Index k = 0; k < m; ++k) consider(solver.eigenvalues()(k));
  }
  return best;
}

}  // namespace

double ellipticity_monitor(const FieldState& state, const Grid& grid, const MixtureSpec& spec) {
  const int m = spec.n - 1;
  double worst = std::numeric_limits<double>::infinity();
  Vec cp(m);
  for (int c = 0; c < grid.num_cells(); ++c) {
    for (int i = 0; i < m; ++i) cp(i) = state.c_prime[i][c];
    const Mat F0 = build_F0(cp, state.c_tot[c], spec);
    worst = std::min(worst, state.T[c] * min_re_inverse_eig(F0));
  }
  return worst;
}

std::vector<double> mass_drift(std::span<const DiagnosticsRow> rows) {
  if (rows.empty()) return {};
  const auto& m0 = rows.front().mass;
  std::vector<double> drift(m0.size(), 0.0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < m0.size(); ++i) {
      const double ref = std::abs(m0[i]) > 0.0 ? std::abs(m0[i]) : 1.0;
      drift[i] = std::max(drift[i], std::abs(row.mass[i] - m0[i]) / ref);
    }
  return drift;
}

MaxPrincipleReport max_principle_report(std::span<const DiagnosticsRow> rows, const Bounds& bounds,
                                        double tol) {
  MaxPrincipleReport report;
  for (const auto& row : rows) {
    const double below = bounds.c_min - row.ctot_min;
    const double above = row.ctot_max - bounds.c_max;
    report.worst_excursion = std::max({report.worst_excursion, below, above});
    if (!std::isfinite(row.ctot_min) || !std::isfinite(row.ctot_max))
      report.worst_excursion = std::numeric_limits<double>::infinity();
  }
  report.pass = report.worst_excursion <= tol;
  return report;
}

DiagnosticsRow compute_diagnostics(const FieldState& state, double dt, const Grid& grid,
                                   const MixtureSpec& spec) {
  DiagnosticsRow row;
  row.t = state.t;
  row.dt = dt;
  const LastSpecies last = recover_last_species(state.c_prime, state.c_tot);
  for (const auto& ci : state.c_prime) row.mass.push_back(integrate(grid, ci));
  row.mass.push_back(integrate(grid, last.c_n));
  row.ctot_min = min_value(state.c_tot);
  row.ctot_max = max_value(state.c_tot);
  row.T_min = min_value(state.T);
  row.T_max = max_value(state.T);
  row.min_re_eig_TB = ellipticity_monitor(state, grid, spec);
  const FluxSet fluxes = reconstruct_fluxes(state, grid, spec);
  const FluxResidual res = flux_gradient_residual(fluxes, state, grid, spec);
  row.flux_residual = res.flux_gradient;
  row.closure_residual = res.closure;
  row.neg_events = last.negativity_events;
  return row;
}

double ConvergenceTable::min_order() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    if (!std::isnan(r.order)) m = std::min(m, r.order);
  return m;
}

ConvergenceTable convergence_order(const std::function<LevelError(int)>& level, int levels) {
  ConvergenceTable table;
  for (int k = 0; k < levels; ++k) {
    const LevelError e = level(k);
    ConvergenceRow row{e.dx, e.dt, e.error_linf, e.error_l2,
                       std::numeric_limits<double>::quiet_NaN()};
    if (!table.rows.empty()) {
      const double prev = table.rows.back().error_linf;
      row.order = std::log2(prev / e.error_linf);
    }
    table.rows.push_back(row);
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.dx > b.dx; });
  return table;
}

}  // namespace msdiff
