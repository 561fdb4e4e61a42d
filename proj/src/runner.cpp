#include "msdiff/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "msdiff/config.hpp"
#include "msdiff/errors.hpp"
#include "msdiff/ms_algebra.hpp"
#include "msdiff/simulation.hpp"

namespace msdiff {

namespace {

// Tolerances for flagging a diagnostics row.
constexpr double kBoundsTol = 1e-12;
constexpr double kMassTol = 1e-10;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snap_t%.6g.csv", t);
  return buf;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) out += (out.empty() ? "" : "|") + f;
  return out;
}

bool all_finite(const FieldState& s) {
  auto ok = [](const Field& u) {
    return std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); });
  };
  return ok(s.c_tot) && ok(s.T) && std::all_of(s.c_prime.begin(), s.c_prime.end(), ok);
}

void write_snapshot(const std::filesystem::path& path, const FieldState& state, const Grid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const int m = static_cast<int>(state.c_prime.size());
  out << "x";
  if (grid.dim() == 2) out << ",y";
  for (int i = 0; i <= m; ++i) out << ",c_" << i + 1;
  out << ",c_tot,T\n";
  const Field c_n = recover_last_species(state.c_prime, state.c_tot).c_n;
  for (int c = 0; c < grid.num_cells(); ++c) {
    out << fmt(grid.center(0, grid.ix(c)));
    if (grid.dim() == 2) out << ',' << fmt(grid.center(1, grid.iy(c)));
    for (int i = 0; i < m; ++i) out << ',' << fmt(state.c_prime[i][c]);
    out << ',' << fmt(c_n[c]) << ',' << fmt(state.c_tot[c]) << ',' << fmt(state.T[c]) << '\n';
  }
}

void write_diagnostics_header(std::ostream& out, int n) {
  out << "t,dt";
  for (int i = 1; i <= n; ++i) out << ",mass_" << i;
  out << ",ctot_min,ctot_max,T_min,T_max,min_re_eig_TB,flux_residual,closure_residual,neg_events,"
         "flags\n";
}

void write_diagnostics_row(std::ostream& out, const DiagnosticsRow& r) {
  out << fmt(r.t) << ',' << fmt(r.dt);
  for (double m : r.mass) out << ',' << fmt(m);
  out << ',' << fmt(r.ctot_min) << ',' << fmt(r.ctot_max) << ',' << fmt(r.T_min) << ','
      << fmt(r.T_max) << ',' << fmt(r.min_re_eig_TB) << ',' << fmt(r.flux_residual) << ','
      << fmt(r.closure_residual) << ',' << r.neg_events << ',' << join_flags(r.flags) << '\n';
}

/// Invariant flags for a row; `first` is the t = 0 row.
std::vector<std::string> invariant_flags(const DiagnosticsRow& row, const DiagnosticsRow& first,
                                         const MixtureSpec& spec, double eta) {
  std::vector<std::string> flags;
  if (row.ctot_min < spec.bounds.c_min - kBoundsTol || row.ctot_max > spec.bounds.c_max + kBoundsTol)
    flags.emplace_back("max_principle");
  if (row.neg_events > 0) flags.emplace_back("negativity");
  if (!(row.T_min > 0.0)) flags.emplace_back("temperature_positivity");
  if (row.min_re_eig_TB < row.T_min / eta - 1e-10) flags.emplace_back("ellipticity");
  for (std::size_t i = 0; i < row.mass.size(); ++i) {
    const double ref = std::max(std::abs(first.mass[i]), 1e-300);
    if (std::abs(row.mass[i] - first.mass[i]) > kMassTol * ref) {
      flags.emplace_back("mass");
      break;
    }
  }
  return flags;
}

bool reached(double t, double target) {
  return std::abs(t - target) <= 1e-12 * std::max(1.0, std::abs(target));
}

/// Advances `sim` to t_end with the adaptive policy, clipping the last step.
int run_to_end(Simulation& sim) {
  const double t_end = sim.config().time.t_end;
  int steps = 0;
  while (t_end - sim.state().t > 1e-12 * t_end) {
    double dt = sim.policy_dt();
    if (sim.state().t + dt >= t_end || reached(sim.state().t + dt, t_end)) dt = t_end - sim.state().t;
    sim.step(dt);
    ++steps;
  }
  return steps;
}

std::vector<Field> species_of(const FieldState& s) {
  std::vector<Field> c = s.c_prime;
  c.push_back(recover_last_species(s.c_prime, s.c_tot).c_n);
  return c;
}

/// Cell averages of a field on the grid coarsened by 2 along every axis.
Field restrict_to_coarse(const Field& fine, const Grid& fine_grid, const Grid& coarse) {
  Field out(coarse.num_cells(), 0.0);
  const double w = 1.0 / (coarse.dim() == 2 ? 4.0 : 2.0);
  for (int c = 0; c < fine_grid.num_cells(); ++c) {
    const int i = fine_grid.ix(c) / 2;
    const int j = coarse.dim() == 2 ? fine_grid.iy(c) / 2 : 0;
    out[coarse.index(i, j)] += w * fine[c];
  }
  return out;
}

}  // namespace

RunOutputs run_scenario(const ScenarioConfig& config, const RunFlags& flags, std::ostream& log) {
  RunOutputs outputs;
  outputs.dir = flags.out_dir ? *flags.out_dir : std::filesystem::path(config.output.dir);
  std::filesystem::create_directories(outputs.dir);
  outputs.diagnostics = outputs.dir / "diagnostics.csv";
  std::ofstream diag(outputs.diagnostics, std::ios::binary);
  if (!diag) throw std::runtime_error("cannot write " + outputs.diagnostics.string());

  Simulation sim(config);
  const Grid& grid = sim.grid();
  const MixtureSpec& spec = sim.mixture();
  const double eta = spectral_bounds(spec).eta;
  const double t_end = config.time.t_end;
  write_diagnostics_header(diag, spec.n);

  std::vector<double> snap_times = config.output.snapshot_times;
  std::sort(snap_times.begin(), snap_times.end());
  snap_times.erase(std::unique(snap_times.begin(), snap_times.end()), snap_times.end());
  std::size_t next_snap = 0;
  double last_snapshot_t = -1.0;
  auto snapshot = [&](double label) {
    const auto path = outputs.dir / snapshot_name(label);
    write_snapshot(path, sim.state(), grid);
    outputs.snapshots.push_back(path);
    last_snapshot_t = sim.state().t;
  };
  auto due_snapshots = [&] {
    while (next_snap < snap_times.size() &&
           (snap_times[next_snap] <= sim.state().t || reached(sim.state().t, snap_times[next_snap])))
      snapshot(snap_times[next_snap++]);
  };

  auto fail = [&](int code, const std::string& what) {
    outputs.exit_status = code;
    outputs.message = "step " + std::to_string(outputs.steps) + ", t = " + fmt(sim.state().t) +
                      ": " + what;
    log << "error: " << outputs.message << '\n';
    return outputs;
  };

  DiagnosticsRow first;
  try {
    first = compute_diagnostics(sim.state(), 0.0, grid, spec);
  } catch (const Error& e) {
    return fail(kExitNumerical, e.what());
  }
  first.flags = invariant_flags(first, first, spec, eta);
  write_diagnostics_row(diag, first);
  due_snapshots();
  if (config.output.every_n_steps > 0) snapshot(0.0);
  if (flags.strict && !first.flags.empty())
    return fail(kExitInvariant, "invariant violated: " + join_flags(first.flags));

  while (t_end - sim.state().t > 1e-12 * t_end) {
    const double t = sim.state().t;
    double target = t_end;
    if (next_snap < snap_times.size()) target = std::min(target, snap_times[next_snap]);
    double dt = sim.policy_dt();
    if (t + dt >= target || reached(t + dt, target)) dt = target - t;

    std::vector<std::string> row_flags;
    for (const auto& limit : sim.cfl_violations(dt)) row_flags.push_back("cfl:" + limit);
    DiagnosticsRow row;
    try {
      sim.step(dt, false);
      ++outputs.steps;
      if (!all_finite(sim.state())) return fail(kExitNumerical, "non-finite values in the state");
      row = compute_diagnostics(sim.state(), dt, grid, spec);
    } catch (const Error& e) {
      return fail(kExitNumerical, e.what());
    }
    const auto inv = invariant_flags(row, first, spec, eta);
    row_flags.insert(row_flags.end(), inv.begin(), inv.end());
    row.flags = row_flags;
    write_diagnostics_row(diag, row);
    due_snapshots();
    if (config.output.every_n_steps > 0 && outputs.steps % config.output.every_n_steps == 0 &&
        last_snapshot_t != sim.state().t)
      snapshot(sim.state().t);
    if (flags.strict && !row.flags.empty()) {
      diag.flush();
      return fail(kExitInvariant, "invariant violated: " + join_flags(row.flags));
    }
  }
  if (last_snapshot_t != sim.state().t) snapshot(sim.state().t);
  log << "completed " << outputs.steps << " steps to t = " << fmt(sim.state().t) << "; wrote "
      << outputs.snapshots.size() << " snapshots to " << outputs.dir.string() << '\n';
  return outputs;
}

ConvergenceTable run_convergence(const ScenarioConfig& config, int levels, std::ostream& log) {
  if (levels < 2) throw Error(ErrorKind::ValidationError, "need at least two levels", "levels");
  struct LevelRun {
    Grid grid;
    std::vector<Field> c;
    double dt = 0.0;
  };
  std::vector<LevelRun> runs;
  for (int level = 0; level < levels; ++level) {
    Simulation sim(refine(config, 1 << level));
    const int steps = run_to_end(sim);
    log << "level " << level << ": " << sim.grid().cells(0) << " cells, " << steps << " steps\n";
    runs.push_back({sim.grid(), species_of(sim.state()), config.time.t_end / steps});
  }
  return convergence_order(
      [&](int k) {
        const LevelRun& coarse = runs[k];
        const LevelRun& fine = runs[k + 1];
        double linf = 0.0, l2 = 0.0;
        for (std::size_t i = 0; i < coarse.c.size(); ++i) {
          const Field r = restrict_to_coarse(fine.c[i], fine.grid, coarse.grid);
          double s = 0.0;
          for (int c = 0; c < coarse.grid.num_cells(); ++c) {
            const double d = coarse.c[i][c] - r[c];
            linf = std::max(linf, std::abs(d));
            s += d * d;
          }
          l2 = std::max(l2, std::sqrt(s * coarse.grid.cell_volume()));
        }
        return LevelError{coarse.grid.spacing(0), coarse.dt, linf, l2};
      },
      levels - 1);
}

void write_convergence_csv(const ConvergenceTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "dx,dt,error_linf,error_l2,order\n";
  for (const auto& r : table.rows)
    out << fmt(r.dx) << ',' << fmt(r.dt) << ',' << fmt(r.error_linf) << ',' << fmt(r.error_l2) << ','
        << (std::isnan(r.order) ? std::string() : fmt(r.order)) << '\n';
}

}  // namespace msdiff
