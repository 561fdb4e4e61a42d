#include <cmath>
#include <numbers>

#include "doctest.h"
#include "msdiff/decoupled_solver.hpp"
#include "msdiff/ms_algebra.hpp"
#include "msdiff/reduced_solver.hpp"
#include "msdiff/simulation.hpp"
#include "msdiff/verify.hpp"
#include "msdiff/verify_suites.hpp"
#include "test_support.hpp"

using namespace msdiff;
using msdiff::test::error_of;
using msdiff::test::mixture;

namespace {

constexpr double kPi = std::numbers::pi;

MixtureSpec generic3() {
  return mixture(3, {{0, 2.0, 5.0}, {0, 0, 1.2}, {0, 0, 0}}, 0.1, {0.6, 2.0, 0.5, 1.5});
}

// Smooth test state built from cosines, so every profile has zero slope at the walls.
struct Smooth {
  double m1 = 0.5, a1 = 0.1;  // c1 = m1 + a1 cos(pi x)
  double m2 = 0.3, a2 = 0.1;  // c2 = m2 + a2 cos(2 pi x)
  double m3 = 0.4, a3 = 0.15; // c3 = m3 + a3 cos(pi x)
  double mT = 1.0, aT = 0.2;  // T  = mT + aT cos(pi x)

  double c1(double x) const { return m1 + a1 * std::cos(kPi * x); }
  double c2(double x) const { return m2 + a2 * std::cos(2 * kPi * x); }
  double c3(double x) const { return m3 + a3 * std::cos(kPi * x); }
  double T(double x) const { return mT + aT * std::cos(kPi * x); }
  double dc1(double x) const { return -a1 * kPi * std::sin(kPi * x); }
  double dc2(double x) const { return -2 * a2 * kPi * std::sin(2 * kPi * x); }
  double dc3(double x) const { return -a3 * kPi * std::sin(kPi * x); }
  double dT(double x) const { return -aT * kPi * std::sin(kPi * x); }

  FieldState state(const Grid& g) const {
    FieldState s;
    const int N = g.num_cells();
    s.c_prime.assign(2, Field(N));
    s.c_tot.resize(N);
    s.T.resize(N);
    for (int i = 0; i < N; ++i) {
      const double x = g.center(0, i);
      s.c_prime[0][i] = c1(x);
      s.c_prime[1][i] = c2(x);
      s.c_tot[i] = c1(x) + c2(x) + c3(x);
      s.T[i] = T(x);
    }
    return s;
  }

  // g(x) = B (c' T_x + alpha c~' c_tot_x), whose derivative is the lower-order term.
  Vec lower_order_flux(double x, const MixtureSpec& spec) const {
    Vec cp(2);
    cp << c1(x), c2(x);
    const double ct = c1(x) + c2(x) + c3(x);
    const double dct = dc1(x) + dc2(x) + dc3(x);
    const Mat B = reduced_mobility(cp, ct, spec);
    return B * (cp * dT(x) + spec.alpha * scaled_concentration(cp, spec) * dct);
  }
};

// Max over cells and components of |r_h - r| with r from the continuous flux.
double lower_order_error(int cells) {
  const MixtureSpec spec = generic3();
  const Grid g = Grid::make_1d(cells, 1.0);
  const Smooth sm;
  const auto r = lower_order_term(sm.state(g), g, spec);
  const double h = g.spacing(0);
  double err = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double xl = i * h, xr = (i + 1) * h;
    const Vec exact = (sm.lower_order_flux(xr, spec) - sm.lower_order_flux(xl, spec)) / h;
    for (int k = 0; k < 2; ++k) err = std::max(err, std::abs(r[k][i] - exact(k)));
  }
  return err;
}

Field mirror_laplacian(const Field& u, double h) {
  const int N = static_cast<int>(u.size());
  Field out(N);
  for (int i = 0; i < N; ++i) {
    const double l = i > 0 ? u[i - 1] : u[i];
    const double r = i < N - 1 ? u[i + 1] : u[i];
    out[i] = (l - 2 * u[i] + r) / (h * h);
  }
  return out;
}

double max_diff(const std::vector<Field>& a, const std::vector<Field>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < a[i].size(); ++k) m = std::max(m, std::abs(a[i][k] - b[i][k]));
  return m;
}

}  // namespace

TEST_CASE("recover_last_species closes the sum and counts negativity") {
  const LastSpecies a = recover_last_species({Field{0.3}, Field{0.3}}, Field{1.0});
  CHECK(a.c_n[0] == doctest::Approx(0.4));
  CHECK(a.negativity_events == 0);
  const LastSpecies b = recover_last_species({Field{0.7, 0.1}, Field{0.5, 0.1}}, Field{1.0, 1.0});
  CHECK(b.c_n[0] == doctest::Approx(-0.2));
  CHECK(b.min_value == doctest::Approx(-0.2));
  CHECK(b.negativity_events == 1);
  CHECK(error_of([] { recover_last_species({Field{0.1, 0.2}}, Field{1.0}); }).first ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("reduced mobility collapses to a scalar for equal coefficients") {
  const MixtureSpec spec = mixture(3, {{0, 2, 2}, {0, 0, 2}, {0, 0, 0}});
  Vec cp(2);
  cp << 0.3, 0.2;
  const Mat B = reduced_mobility(cp, 0.8, spec);
  CHECK((B - Mat::Identity(2, 2) / (2.0 * 0.8)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("stable dt for the scalar case") {
  const MixtureSpec spec = mixture(2, {{0, 3}, {0, 0}}, 0.1, {0.5, 2.0, 0.5, 1.5});
  const Grid g = Grid::make_1d(10, 1.0);
  FieldState s{0.0, {Field(10, 0.4)}, Field(10, 1.0), Field(10, 1.2)};
  CHECK(stable_dt(s, g, spec) == doctest::Approx(0.45 * 0.01 * (0.5 * 3.0) / (2.0 * 1.2)));
  CHECK(reduced_step_explicit(s, stable_dt(s, g, spec), g, spec).size() == 1);
  CHECK(error_of([&] { reduced_step_explicit(s, 3 * stable_dt(s, g, spec), g, spec); }).first ==
        ErrorKind::CFLViolation);
}

TEST_CASE("uniform state is a fixed point of both reduced steppers") {
  const MixtureSpec spec = generic3();
  const Grid g = Grid::make_2d(5, 4, 1.0, 1.0);
  const int N = g.num_cells();
  FieldState s{0.0, {Field(N, 0.3), Field(N, 0.2)}, Field(N, 1.0), Field(N, 1.1)};
  const double dt = stable_dt(s, g, spec);
  CHECK(max_diff(reduced_step_explicit(s, dt, g, spec), s.c_prime) <= 1e-15);
  CHECK(max_diff(reduced_step_semi_implicit(s, 20 * dt, g, spec), s.c_prime) <= 1e-14);
  for (const auto& r : lower_order_term(s, g, spec))
    for (double v : r) CHECK(v == 0.0);
}

TEST_CASE("equal-k isothermal step is a scalar heat step with diffusivity T/(k c_tot)") {
  const MixtureSpec spec = mixture(3, {{0, 2, 2}, {0, 0, 2}, {0, 0, 0}}, 0.1, {0.5, 1.5, 0.5, 1.5});
  const Grid g = Grid::make_1d(24, 1.0);
  FieldState s;
  s.c_prime = {sample_profile(CosineProfile{0.3, 0.1, {1, 0}}, g),
               sample_profile(CosineProfile{0.3, 0.05, {3, 0}}, g)};
  s.c_tot = Field(24, 1.0);
  s.T = Field(24, 1.2);
  const double dt = stable_dt(s, g, spec);
  const auto next = reduced_step_explicit(s, dt, g, spec);
  const double D = 1.2 / (2.0 * 1.0);
  for (int k = 0; k < 2; ++k) {
    const Field lap = mirror_laplacian(s.c_prime[k], g.spacing(0));
    for (int i = 0; i < 24; ++i) CHECK(next[k][i] == doctest::Approx(s.c_prime[k][i] + dt * D * lap[i]).epsilon(1e-14));
  }
}

TEST_CASE("lower-order term converges to the continuous flux divergence at second order") {
  const double e32 = lower_order_error(32);
  const double e64 = lower_order_error(64);
  INFO("errors " << e32 << " " << e64);
  CHECK(std::log2(e32 / e64) >= 1.8);
}

TEST_CASE("explicit reduced step conserves every species") {
  const MixtureSpec spec = generic3();
  const Grid g = Grid::make_1d(40, 1.0);
  FieldState s = Smooth{}.state(g);
  const double m0 = integrate(g, s.c_prime[0]), m1 = integrate(g, s.c_prime[1]);
  const double dt = stable_dt(s, g, spec);
  for (int k = 0; k < 100; ++k) s.c_prime = reduced_step_explicit(s, dt, g, spec);
  CHECK(std::abs(integrate(g, s.c_prime[0]) - m0) <= 1e-14 * m0);
  CHECK(std::abs(integrate(g, s.c_prime[1]) - m1) <= 1e-14 * m1);
}

TEST_CASE("semi-implicit step conserves mass and agrees with the explicit step for small dt") {
  const MixtureSpec spec = generic3();
  const Grid g = Grid::make_1d(40, 1.0);
  const FieldState s = Smooth{}.state(g);
  const double dt = 1e-3 * stable_dt(s, g, spec);
  const auto ex = reduced_step_explicit(s, dt, g, spec);
  const auto im = reduced_step_semi_implicit(s, dt, g, spec);
  CHECK(max_diff(ex, im) <= 1e-3 * max_diff(ex, s.c_prime));

  const auto big = reduced_step_semi_implicit(s, 50 * stable_dt(s, g, spec), g, spec);
  for (int k = 0; k < 2; ++k)
    CHECK(integrate(g, big[k]) == doctest::Approx(integrate(g, s.c_prime[k])).epsilon(1e-13));
}

TEST_CASE("reconstructed fluxes reproduce the explicit update and close the sum") {
  const MixtureSpec spec = generic3();
  const Grid g = Grid::make_1d(30, 1.0);
  const FieldState s = Smooth{}.state(g);
  const FluxSet f = reconstruct_fluxes(s, g, spec);
  REQUIRE(f.J.size() == 3);
  const double dt = stable_dt(s, g, spec);
  const auto next = reduced_step_explicit(s, dt, g, spec);
  for (int k = 0; k < 2; ++k) {
    const Field div = divergence(g, f.J[k]);
    for (int i = 0; i < 30; ++i) CHECK(next[k][i] == doctest::Approx(s.c_prime[k][i] - dt * div[i]).epsilon(1e-13));
  }
  CHECK(flux_gradient_residual(f, s, g, spec).closure <= 1e-14);
}

TEST_CASE("compact-stencil oracle matches the reduced step to round-off") {
  const MixtureSpec spec = generic3();
  const Grid g = Grid::make_1d(48, 1.0);
  const FieldState s = Smooth{}.state(g);
  const double dt = stable_dt(s, g, spec);
  std::vector<Field> c = s.c_prime;
  c.push_back(recover_last_species(s.c_prime, s.c_tot).c_n);

  const OracleStep o = full_system_step_oracle(c, s.T, s.c_tot, dt, g, spec, OracleStencil::Compact);
  const auto reduced = reduced_step_explicit(s, dt, g, spec);
  const Field c_tot_next = heat_step(s.c_tot, dt, spec.alpha, g);
  const Field c_n = recover_last_species(reduced, c_tot_next).c_n;
  CHECK(max_diff({o.c[0], o.c[1], o.c[2]}, {reduced[0], reduced[1], c_n}) <= 1e-13);
  CHECK(o.fluxes.closure_residual <= 1e-13);
}

TEST_CASE("adding the c_tot rate to the lower-order term breaks agreement with the oracle") {
  const MixtureSpec spec = generic3();
  const Grid g = Grid::make_1d(48, 1.0);
  const FieldState s = Smooth{}.state(g);
  const double dt = stable_dt(s, g, spec);
  std::vector<Field> c = s.c_prime;
  c.push_back(recover_last_species(s.c_prime, s.c_tot).c_n);
  const OracleStep o = full_system_step_oracle(c, s.T, s.c_tot, dt, g, spec, OracleStencil::Compact);
  ReducedOptions with_rate;
  with_rate.include_ctot_rate = true;
  const auto reduced = reduced_step_explicit(s, dt, g, spec, with_rate);
  const double gap = max_diff({o.c[0], o.c[1]}, reduced);
  const double expected = dt * max_abs(dt_log_ctot(s.c_tot, spec.alpha, g)) * min_value(s.c_tot);
  CHECK(gap >= 0.5 * expected);
}

TEST_CASE("simulation steps in order and respects the hard limits") {
  ScenarioConfig cfg = equivalence_scenario(32);
  Simulation sim(cfg);
  const StepLimits lim = sim.limits();
  CHECK(lim.recommended <= lim.heat);
  CHECK(lim.recommended <= lim.reduced);
  CHECK(lim.recommended <= lim.advective);
  const FieldState before = sim.state();
  CHECK(error_of([&] { sim.step(2.0 * lim.reduced); }).first == ErrorKind::CFLViolation);
  CHECK(sim.state().c_prime == before.c_prime);
  CHECK(sim.cfl_violations(2.0 * lim.reduced).size() >= 1);

  sim.step(lim.recommended);
  const Field expected_ctot = heat_step(before.c_tot, lim.recommended, cfg.mixture.alpha, sim.grid());
  CHECK(sim.state().c_tot == expected_ctot);
  CHECK(sim.state().c_prime == reduced_step_explicit(before, lim.recommended, sim.grid(), sim.mixture()));
  CHECK(sim.state().t == lim.recommended);
}

TEST_CASE("semi-implicit simulation allows steps beyond the explicit limit") {
  ScenarioConfig cfg = equivalence_scenario(32);
  cfg.concentration_scheme = ConcentrationScheme::SemiImplicit;
  cfg.temperature_scheme = TemperatureScheme::Characteristics;
  Simulation sim(cfg);
  const double explicit_limit = stable_dt(sim.state(), sim.grid(), sim.mixture());
  CHECK(sim.limits().recommended > 5 * explicit_limit);
  const double m0 = integrate(sim.grid(), sim.state().c_prime[0]);
  for (int k = 0; k < 5; ++k) sim.step(sim.policy_dt());
  CHECK(integrate(sim.grid(), sim.state().c_prime[0]) == doctest::Approx(m0).epsilon(1e-13));
  CHECK(sim.history().size() == 6);
}
