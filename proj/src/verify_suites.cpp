#include "msdiff/verify_suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "msdiff/decoupled_solver.hpp"
#include "msdiff/errors.hpp"
#include "msdiff/ms_algebra.hpp"
#include "msdiff/reduced_solver.hpp"
#include "msdiff/simulation.hpp"

namespace msdiff {

bool Check::pass() const {
  if (std::isnan(value)) return false;
  return sense == Sense::AtMost ? value <= limit : value >= limit;
}

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

const Check* SuiteResult::find(const std::string& check_name) const {
  for (const auto& c : checks)
    if (c.name == check_name) return &c;
  return nullptr;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Check at_most(std::string name, double value, double limit) {
  return {std::move(name), value, limit, Check::Sense::AtMost};
}

Check at_least(std::string name, double value, double limit) {
  return {std::move(name), value, limit, Check::Sense::AtLeast};
}

MixtureSpec make_mixture(int n, const std::vector<std::vector<double>>& K, double alpha,
                         Bounds bounds) {
  RawMixture raw;
  raw.n = n;
  raw.K = K;
  raw.alpha = alpha;
  raw.bounds = bounds;
  return validate_mixture(raw);
}

/// Tracks min over observed states of (min Re eig(T B) - min T / eta).
class EllipticityTracker {
 public:
  explicit EllipticityTracker(const MixtureSpec& spec) : eta_(spectral_bounds(spec).eta) {}

  void observe(const FieldState& state, const Grid& grid, const MixtureSpec& spec) {
    observe_value(ellipticity_monitor(state, grid, spec), min_value(state.T));
  }
  void observe_value(double min_re_eig_TB, double T_min) {
    margin_ = std::min(margin_, min_re_eig_TB - T_min / eta_);
  }
  Check check() const { return at_least(kEllipticityCheck, margin_, -kEllipticityTol); }

 private:
  double eta_;
  double margin_ = kInf;
};

/// Fixed number of equal steps covering [0, t_end] with dt <= dt_max,
/// rounded up to a multiple of `multiple`.
int step_count(double t_end, double dt_max, int multiple = 1) {
  int steps = static_cast<int>(std::ceil(t_end / dt_max * (1.0 - 1e-12)));
  steps = std::max(steps, 1);
  return (steps + multiple - 1) / multiple * multiple;
}

/// Amplitude of cos(pi x / L) along axis 0 of a 1D field.
double cosine_amplitude(const Field& u, const Grid& grid) {
  const int N = grid.cells(0);
  double mean = 0.0;
  for (double v : u) mean += v;
  mean /= N;
  double a = 0.0;
  for (int i = 0; i < N; ++i)
    a += (u[i] - mean) * std::cos(kPi * grid.center(0, i) / grid.length(0));
  return 2.0 * a / N;
}

double linf_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double l2_diff(const Field& a, const Field& b, const Grid& grid) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s * grid.cell_volume());
}

/// Every species of a state, c_n recovered from the closure.
std::vector<Field> all_species(const FieldState& state) {
  std::vector<Field> c = state.c_prime;
  c.push_back(recover_last_species(state.c_prime, state.c_tot).c_n);
  return c;
}

/// Checks the observed order of every row after the first.
void add_order_checks(SuiteResult& result, const std::string& prefix,
                      const ConvergenceTable& table, double min_order) {
  for (std::size_t k = 1; k < table.rows.size(); ++k)
    result.checks.push_back(
        at_least(prefix + "_order_" + std::to_string(k), table.rows[k].order, min_order));
}

}  // namespace

std::vector<AlgebraSample> algebra_samples(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int sizes[] = {2, 3, 4, 6};
  std::vector<AlgebraSample> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int s = 0; s < count; ++s) {
    const int n = sizes[rng() % 4];
    std::vector<std::vector<double>> K(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) K[i][j] = std::exp(std::log(0.1) + unit(rng) * std::log(100.0));
    Bounds b;
    b.c_min = 0.1 + 0.9 * unit(rng);
    b.c_max = b.c_min * (1.0 + 4.0 * unit(rng));
    b.T_min = 0.5;
    b.T_max = 1.5;
    const double c_tot = b.c_min + (b.c_max - b.c_min) * unit(rng);

    Vec w(n);
    for (int i = 0; i < n; ++i) w(i) = unit(rng) < 0.1 ? 0.0 : unit(rng);
    if (!(w.sum() > 0.0)) w(rng() % n) = 1.0;

    AlgebraSample sample;
    sample.spec = make_mixture(n, K, 1.0, b);
    sample.c = w * (c_tot / w.sum());
    out.push_back(std::move(sample));
  }
  return out;
}

SuiteResult spectra_suite(std::uint64_t seed, int samples) {
  const auto start = Clock::now();
  SuiteResult result;
  result.name = "spectra";
  int fail_F = 0, fail_zero = 0, fail_F0 = 0, fail_B = 0;
  double worst_F = kInf, worst_F0 = kInf, worst_B = kInf;
  for (const auto& s : algebra_samples(seed, samples)) {
    const int n = s.spec.n;
    const SpectralBounds sb = spectral_bounds(s.spec);
    const double tol = 1e-8 * sb.eta;

    const SpectralReport rF = eigen_check(-build_F(s.c, s.spec), {sb.delta, sb.eta, true}, tol, "-F");
    if (!rF.pass) ++fail_F;
    if (rF.near_zero != 1) ++fail_zero;
    worst_F = std::min(worst_F, rF.worst_margin / sb.eta);

    const Vec c_prime = s.c.head(n - 1);
    const Mat F0 = build_F0(c_prime, s.c.sum(), s.spec);
    const SpectralReport r0 = eigen_check(F0, {sb.delta, sb.eta, false}, tol, "F0");
    if (!r0.pass) ++fail_F0;
    worst_F0 = std::min(worst_F0, r0.worst_margin / sb.eta);

    const double tol_B = std::min(1e-8 * sb.eta, 1e-8 / sb.delta);
    const SpectralReport rB =
        eigen_check(invert_F0(F0), {1.0 / sb.eta, 1.0 / sb.delta, false}, tol_B, "B");
    if (!rB.pass) ++fail_B;
    worst_B = std::min(worst_B, rB.worst_margin * sb.delta);
  }
  result.checks.push_back(at_most("minusF_outside_bounds", fail_F, 0));
  result.checks.push_back(at_most("minusF_zero_count_not_one", fail_zero, 0));
  result.checks.push_back(at_most("F0_outside_bounds", fail_F0, 0));
  result.checks.push_back(at_most("B_outside_bounds", fail_B, 0));
  // Worst slack, normalized by eta (for -F and F0) and by 1/delta (for B).
  result.checks.push_back(at_least("minusF_worst_margin_over_eta", worst_F, -1e-8));
  result.checks.push_back(at_least("F0_worst_margin_over_eta", worst_F0, -1e-8));
  result.checks.push_back(at_least("B_worst_margin_times_delta", worst_B, -1e-8));
  result.seconds = seconds_since(start);
  result.checks.push_back(at_most("runtime_seconds", result.seconds, 10.0));
  return result;
}

SuiteResult conjugation_suite(std::uint64_t seed, int samples) {
  const auto start = Clock::now();
  SuiteResult result;
  result.name = "conjugation";
  double kernel = 0.0, bottom = 0.0, top_left = 0.0, top_right = 0.0;
  for (const auto& s : algebra_samples(seed, samples)) {
    const int n = s.spec.n;
    const Mat F = build_F(s.c, s.spec);
    const double scale = F.cwiseAbs().maxCoeff();
    kernel = std::max(kernel, F.colwise().sum().cwiseAbs().maxCoeff() / scale);
    const ConjugationResiduals r = conjugation_residuals(F, s.c.head(n - 1), s.c.sum(), s.spec);
    bottom = std::max(bottom, r.bottom_row);
    top_left = std::max(top_left, r.top_left);
    top_right = std::max(top_right, r.top_right);
  }
  result.checks.push_back(at_most("kernel_column_sum_rel", kernel, 1e-14));
  result.checks.push_back(at_most("top_left_plus_F0_rel", top_left, 1e-12));
  result.checks.push_back(at_most("bottom_row_rel", bottom, 1e-13));
  result.checks.push_back(at_most("top_right_minus_scaled_c_rel", top_right, 1e-12));
  result.seconds = seconds_since(start);
  return result;
}

SuiteResult heat_order_suite() {
  const auto start = Clock::now();
  SuiteResult result;
  result.name = "heat_order";
  const double alpha = 0.1, length = 1.0, t_end = 0.5, eps = 0.1;
  const double exact = eps * std::exp(-alpha * kPi * kPi * t_end / (length * length));

  const auto table = convergence_order(
      [&](int level) {
        const int cells = 32 << level;
        const Grid grid = Grid::make_1d(cells, length);
        const double h = grid.spacing(0);
        const int steps = step_count(t_end, 0.2 * h * h / alpha);
        const double dt = t_end / steps;
        Field c = sample_profile(CosineProfile{1.0, eps, {1, 0}}, grid);
        for (int k = 0; k < steps; ++k) c = heat_step(c, dt, alpha, grid);
        const double err = std::abs(cosine_amplitude(c, grid) - exact) / exact;
        return LevelError{h, dt, err, err};
      },
      3);
  add_order_checks(result, "amplitude", table, 1.9);
  result.checks.push_back(at_most("finest_amplitude_rel_error", table.rows.back().error_linf, 1e-4));
  result.tables.emplace_back("heat_amplitude", table);
  result.seconds = seconds_since(start);
  return result;
}

SuiteResult temperature_crossval_suite(int levels) {
  const auto start = Clock::now();
  SuiteResult result;
  result.name = "temperature_crossval";
  const double alpha = 0.1, t_end = 0.25;

  const auto table = convergence_order(
      [&](int level) {
        const Grid grid = Grid::make_1d(32 << level, 1.0);
        const int steps = step_count(t_end, heat_stable_dt(alpha, grid));
        const double dt = t_end / steps;
        Field c_tot = sample_profile(CosineProfile{1.0, 0.3, {1, 0}}, grid);
        const Field T_in = sample_profile(CosineProfile{1.0, 0.3, {2, 0}}, grid);
        Field T_up = T_in;
        CtotHistory history;
        history.push(0.0, c_tot);
        for (int k = 0; k < steps; ++k) {
          const VelocityField V = advection_velocity(c_tot, alpha, grid);
          T_up = temperature_step_upwind(T_up, V, dt_log_ctot(c_tot, alpha, grid), dt, grid);
          c_tot = heat_step(c_tot, dt, alpha, grid);
          history.push(dt * (k + 1), c_tot);
        }
        const Field T_char = temperature_characteristics(T_in, history, history.time(steps), alpha, grid);
        return LevelError{grid.spacing(0), dt, linf_diff(T_up, T_char), l2_diff(T_up, T_char, grid)};
      },
      levels);
  add_order_checks(result, "gap", table, 0.9);
  result.tables.emplace_back("temperature_gap", table);

  // Pure source: V = 0 and s = sigma everywhere.
  const Grid grid = Grid::make_1d(16, 1.0);
  const double sigma = 0.1, dt = 5e-4;
  const int steps = 1000;
  Field T(grid.num_cells(), 1.0);
  const Field s(grid.num_cells(), sigma);
  const VelocityField still{FaceField::zeros(grid)};
  for (int k = 0; k < steps; ++k) T = temperature_step_upwind(T, still, s, dt, grid);
  const double expected = std::exp(2.0 * sigma * dt * steps / 3.0);
  double err = 0.0;
  for (double v : T) err = std::max(err, std::abs(v - expected) / expected);
  result.checks.push_back(at_most("pure_source_rel_error", err, 1e-6));
  result.seconds = seconds_since(start);
  return result;
}

ScenarioConfig equivalence_scenario(int cells) {
  ScenarioConfig cfg;
  cfg.mixture = make_mixture(3, {{0, 2.0, 5.0}, {0, 0, 1.2}, {0, 0, 0}}, 0.1, {0.65, 2.0, 0.5, 1.5});
  cfg.grid = Grid::make_1d(cells, 1.0);
  GaussianProfile g;
  g.center = {0.35, 0.5};
  g.width = 0.12;
  g.floor = 0.25;
  g.peak = 0.25;
  cfg.species = {g, CosineProfile{0.3, 0.1, {2, 0}}, CosineProfile{0.4, 0.15, {1, 0}}};
  cfg.temperature = CosineProfile{1.0, 0.2, {1, 0}};
  cfg.time.t_end = 0.05;
  cfg.concentration_scheme = ConcentrationScheme::Explicit;
  cfg.temperature_scheme = TemperatureScheme::Upwind;
  return cfg;
}

SuiteResult equivalence_suite(int levels) {
  const auto start = Clock::now();
  SuiteResult result;
  result.name = "equivalence";
  const double t_end = 0.05;
  const int multiple = 1 << (levels - 1);

  // The finest level fixes the step; every coarser level doubles it.
  Simulation finest(equivalence_scenario(64 * multiple));
  const int fine_steps = step_count(t_end, 0.8 * finest.limits().recommended, multiple);
  const double dt_fine = t_end / fine_steps;

  EllipticityTracker ellipticity(finest.mixture());
  double closure_reduced = 0.0, closure_oracle = 0.0;
  const auto table = convergence_order(
      [&](int level) {
        const int factor = 1 << (levels - 1 - level);
        Simulation sim(equivalence_scenario(64 << level));
        const Grid& grid = sim.grid();
        const MixtureSpec& spec = sim.mixture();
        const int steps = fine_steps / factor;
        const double dt = dt_fine * factor;
        std::vector<Field> c = all_species(sim.state());
        ellipticity.observe(sim.state(), grid, spec);
        for (int k = 0; k < steps; ++k) {
          const FieldState& now = sim.state();
          closure_reduced = std::max(
              closure_reduced,
              flux_gradient_residual(reconstruct_fluxes(now, grid, spec), now, grid, spec).closure);
          OracleStep oracle = full_system_step_oracle(c, now.T, now.c_tot, dt, grid, spec);
          FieldState oracle_state{now.t, std::vector<Field>(c.begin(), c.end() - 1), now.c_tot, now.T};
          closure_oracle = std::max(
              closure_oracle, flux_gradient_residual(oracle.fluxes, oracle_state, grid, spec).closure);
          c = std::move(oracle.c);
          sim.step(dt);
          ellipticity.observe(sim.state(), grid, spec);
        }
        const std::vector<Field> reduced = all_species(sim.state());
        double linf = 0.0, l2 = 0.0;
        for (int i = 0; i < spec.n; ++i) {
          linf = std::max(linf, linf_diff(reduced[i], c[i]));
          l2 = std::max(l2, l2_diff(reduced[i], c[i], grid));
        }
        return LevelError{grid.spacing(0), dt, linf, l2};
      },
      levels);
  for (std::size_t k = 1; k < table.rows.size(); ++k)
    result.checks.push_back(at_least("contraction_" + std::to_string(k),
                                     table.rows[k - 1].error_linf / table.rows[k].error_linf, 3.5));
  result.checks.push_back(at_most("closure_reduced_rel", closure_reduced, 1e-12));
  result.checks.push_back(at_most("closure_oracle_rel", closure_oracle, 1e-12));
  result.checks.push_back(ellipticity.check());
  result.tables.emplace_back("reduced_vs_oracle", table);
  result.seconds = seconds_since(start);
  return result;
}

ScenarioConfig equal_k_scenario(int cells) {
  ScenarioConfig cfg;
  cfg.mixture = make_mixture(3, {{0, 2.0, 2.0}, {0, 0, 2.0}, {0, 0, 0}}, 0.1, {0.5, 1.5, 0.5, 1.5});
  cfg.grid = Grid::make_1d(cells, 1.0);
  cfg.species = {CosineProfile{0.3, 0.1, {1, 0}}, UniformProfile{0.3}, CosineProfile{0.4, -0.1, {1, 0}}};
  cfg.temperature = UniformProfile{1.0};
  cfg.time.t_end = 0.1;
  cfg.temperature_scheme = TemperatureScheme::Upwind;
  return cfg;
}

SuiteResult equal_k_suite() {
  const auto start = Clock::now();
  SuiteResult result;
  result.name = "equal_k";
  Simulation sim(equal_k_scenario(128));
  const Grid& grid = sim.grid();
  const MixtureSpec& spec = sim.mixture();
  const double t_end = sim.config().time.t_end;
  const double k = spec.k(0, 1);

  const std::vector<Field> c0 = all_species(sim.state());
  const double T = sim.state().T[0], c_tot = sim.state().c_tot[0];
  const double expected_rate = T / (k * c_tot) * kPi * kPi;

  EllipticityTracker ellipticity(spec);
  Diagnostics diag;
  diag.append(compute_diagnostics(sim.state(), 0.0, grid, spec));
  ellipticity.observe(sim.state(), grid, spec);
  const int steps = step_count(t_end, sim.policy_dt());
  const double dt = t_end / steps;
  for (int s = 0; s < steps; ++s) {
    sim.step(dt);
    diag.append(compute_diagnostics(sim.state(), dt, grid, spec));
    ellipticity.observe(sim.state(), grid, spec);
  }
  const std::vector<Field> c1 = all_species(sim.state());
  for (int i = 0; i < spec.n; ++i) {
    const double a0 = cosine_amplitude(c0[i], grid);
    if (std::abs(a0) < 1e-12) continue;
    const double rate = -std::log(cosine_amplitude(c1[i], grid) / a0) / sim.state().t;
    result.checks.push_back(at_most("species_" + std::to_string(i + 1) + "_rate_rel_error",
                                    std::abs(rate / expected_rate - 1.0), 0.01));
  }
  const auto drift = mass_drift(diag.rows());
  result.checks.push_back(at_most("mass_drift", *std::max_element(drift.begin(), drift.end()), 1e-12));
  result.checks.push_back(ellipticity.check());
  result.seconds = seconds_since(start);
  return result;
}

ScenarioConfig max_principle_scenario(int dim) {
  ScenarioConfig cfg;
  cfg.mixture = make_mixture(2, {{0, 2.0}, {0, 0}}, 0.1, {0.9, 1.1, 0.5, 1.5});
  cfg.grid = dim == 1 ? Grid::make_1d(64, 1.0) : Grid::make_2d(32, 32, 1.0, 1.0);
  cfg.species = {CosineProfile{0.5, 0.1, {1, dim == 1 ? 0 : 1}}, UniformProfile{0.5}};
  cfg.temperature = UniformProfile{1.0};
  cfg.time.t_end = 0.5;
  cfg.temperature_scheme = TemperatureScheme::Upwind;
  return cfg;
}

SuiteResult max_principle_suite() {
  const auto start = Clock::now();
  SuiteResult result;
  result.name = "max_principle";
  EllipticityTracker ellipticity(max_principle_scenario(1).mixture);
  for (int dim = 1; dim <= 2; ++dim) {
    Simulation sim(max_principle_scenario(dim));
    const Grid& grid = sim.grid();
    const MixtureSpec& spec = sim.mixture();
    const double t_end = sim.config().time.t_end;
    Diagnostics diag;
    auto record = [&](double dt) {
      DiagnosticsRow row = compute_diagnostics(sim.state(), dt, grid, spec);
      ellipticity.observe_value(row.min_re_eig_TB, row.T_min);
      diag.append(std::move(row));
    };
    const double mass0 = integrate(grid, sim.state().c_tot);
    double mass_err = 0.0;
    record(0.0);
    while (t_end - sim.state().t > 1e-12 * t_end) {
      const double dt = std::min(sim.policy_dt(), t_end - sim.state().t);
      sim.step(dt);
      record(dt);
      mass_err = std::max(mass_err, std::abs(integrate(grid, sim.state().c_tot) - mass0) / mass0);
    }
    const MaxPrincipleReport mp = max_principle_report(diag.rows(), spec.bounds);
    const std::string tag = std::to_string(dim) + "d";
    result.checks.push_back(at_most("excursion_" + tag, mp.worst_excursion, 1e-12));
    result.checks.push_back(at_most("ctot_mass_drift_" + tag, mass_err, 1e-13));
  }
  result.checks.push_back(ellipticity.check());
  result.seconds = seconds_since(start);
  return result;
}

std::vector<SuiteResult> run_named_suite(const std::string& name, std::uint64_t seed, int samples) {
  if (name == "spectra") return {spectra_suite(seed, samples)};
  if (name == "conjugation") return {conjugation_suite(seed, samples)};
  if (name == "equivalence") return {equivalence_suite()};
  if (name == "convergence") return {heat_order_suite(), temperature_crossval_suite()};
  if (name == "all")
    return {spectra_suite(seed, samples), conjugation_suite(seed, samples), equivalence_suite(),
            heat_order_suite(), temperature_crossval_suite()};
  throw Error(ErrorKind::ValidationError, "unknown suite \"" + name + "\"", "suite");
}

}  // namespace msdiff
