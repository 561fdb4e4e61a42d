#include <cmath>
#include <numbers>

#include "doctest.h"
#include "msdiff/core_model.hpp"
#include "msdiff/errors.hpp"
#include "msdiff/grid.hpp"
#include "test_support.hpp"

using namespace msdiff;
using msdiff::test::error_of;

namespace {

RawMixture raw_pair(double k01, double k10) {
  RawMixture raw;
  raw.n = 2;
  raw.K = {{0.0, k01}, {k10, 0.0}};
  raw.alpha = 0.1;
  raw.bounds = {0.5, 2.0, 0.5, 1.5};
  return raw;
}

ScenarioConfig pair_scenario() {
  ScenarioConfig cfg;
  cfg.mixture = validate_mixture(raw_pair(3.0, 0.0));
  cfg.grid = Grid::make_1d(8, 1.0);
  cfg.species = {UniformProfile{0.4}, UniformProfile{0.6}};
  cfg.temperature = UniformProfile{1.0};
  cfg.time.t_end = 1.0;
  return cfg;
}

}  // namespace

TEST_CASE("validate_mixture accepts either triangle and symmetrizes") {
  for (auto raw : {raw_pair(3.0, 0.0), raw_pair(0.0, 3.0), raw_pair(3.0, 3.0)}) {
    const MixtureSpec spec = validate_mixture(raw);
    CHECK(spec.k(0, 1) == 3.0);
    CHECK(spec.k(1, 0) == 3.0);
    CHECK(spec.K(0, 0) == 0.0);
  }
}

TEST_CASE("validate_mixture names the offending entry") {
  auto [kind, field] = error_of([] { validate_mixture(raw_pair(3.0, 4.0)); });
  CHECK(kind == ErrorKind::AsymmetricTable);
  CHECK(field == "K[0][1]");

  std::tie(kind, field) = error_of([] { validate_mixture(raw_pair(-1.0, 0.0)); });
  CHECK(kind == ErrorKind::NonPositiveCoefficient);
  CHECK(field == "K[0][1]");

  std::tie(kind, field) = error_of([] { validate_mixture(raw_pair(0.0, 0.0)); });
  CHECK(kind == ErrorKind::NonPositiveCoefficient);
}

TEST_CASE("validate_mixture rejects bad sizes, alpha and bounds") {
  RawMixture raw = raw_pair(1.0, 0.0);
  raw.n = 1;
  raw.K = {{0.0}};
  CHECK(error_of([&] { validate_mixture(raw); }).first == ErrorKind::DimensionMismatch);

  raw = raw_pair(1.0, 0.0);
  raw.K.pop_back();
  CHECK(error_of([&] { validate_mixture(raw); }).first == ErrorKind::DimensionMismatch);

  raw = raw_pair(1.0, 0.0);
  raw.alpha = 0.0;
  CHECK(error_of([&] { validate_mixture(raw); }) == std::pair{ErrorKind::BadBounds, std::string("alpha")});

  raw = raw_pair(1.0, 0.0);
  raw.bounds.c_min = 0.0;
  CHECK(error_of([&] { validate_mixture(raw); }).second == "bounds.c_min");

  raw = raw_pair(1.0, 0.0);
  raw.bounds.c_max = 0.4;
  CHECK(error_of([&] { validate_mixture(raw); }).second == "bounds.c_max");

  raw = raw_pair(1.0, 0.0);
  raw.bounds.T_max = 0.1;
  CHECK(error_of([&] { validate_mixture(raw); }).second == "bounds.T_max");
}

TEST_CASE("profiles evaluate their closed forms") {
  const double pi = std::numbers::pi;
  CHECK(evaluate_profile(UniformProfile{0.7}, {0.3, 0.9}) == 0.7);
  CHECK(evaluate_profile(CosineProfile{1.0, 0.2, {1, 0}}, {0.25, 0.7}) ==
        doctest::Approx(1.0 + 0.2 * std::cos(pi * 0.25)));
  CHECK(evaluate_profile(CosineProfile{1.0, 0.2, {2, 1}}, {0.1, 0.3}) ==
        doctest::Approx(1.0 + 0.2 * std::cos(2 * pi * 0.1) * std::cos(pi * 0.3)));
  GaussianProfile g;
  g.center = {0.4, 0.5};
  g.width = 0.1;
  g.floor = 0.2;
  g.peak = 0.3;
  CHECK(evaluate_profile(g, {0.5, 0.5}) == doctest::Approx(0.2 + 0.3 * std::exp(-0.5)));
  CHECK(evaluate_profile(StepProfile{1.0, 2.0, 0.5}, {0.49, 0}) == 1.0);
  CHECK(evaluate_profile(StepProfile{1.0, 2.0, 0.5}, {0.51, 0}) == 2.0);
}

TEST_CASE("sampled 1D Gaussian has no transverse falloff") {
  GaussianProfile g;
  g.center = {0.5625, 0.5};
  g.width = 0.05;
  g.peak = 1.0;
  const Grid grid = Grid::make_1d(8, 1.0);
  const Field u = sample_profile(g, grid);
  CHECK(u[4] == doctest::Approx(1.0));
}

TEST_CASE("sampled cosine uses positions scaled by the box length") {
  const Grid grid = Grid::make_1d(4, 2.0);
  const Field u = sample_profile(CosineProfile{0.0, 1.0, {1, 0}}, grid);
  CHECK(u[0] == doctest::Approx(std::cos(std::numbers::pi * 0.25 / 2.0)));
  CHECK(u[0] + u[3] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("build_initial_state splits species and sums c_tot") {
  const FieldState s = build_initial_state(pair_scenario());
  REQUIRE(s.c_prime.size() == 1);
  CHECK(s.t == 0.0);
  for (int c = 0; c < 8; ++c) {
    CHECK(s.c_prime[0][c] == 0.4);
    CHECK(s.c_tot[c] == doctest::Approx(1.0));
    CHECK(s.T[c] == 1.0);
  }
}

TEST_CASE("build_initial_state rejects profiles outside the admissible set") {
  ScenarioConfig cfg = pair_scenario();
  cfg.species[1] = UniformProfile{-0.1};
  CHECK(error_of([&] { build_initial_state(cfg); }) ==
        std::pair{ErrorKind::ProfileOutOfBounds, std::string("initial.species[1]")});

  cfg = pair_scenario();
  cfg.species[1] = UniformProfile{2.0};
  CHECK(error_of([&] { build_initial_state(cfg); }) ==
        std::pair{ErrorKind::ProfileOutOfBounds, std::string("initial.species")});

  cfg = pair_scenario();
  cfg.temperature = UniformProfile{2.0};
  CHECK(error_of([&] { build_initial_state(cfg); }) ==
        std::pair{ErrorKind::ProfileOutOfBounds, std::string("initial.temperature")});

  cfg = pair_scenario();
  cfg.species.pop_back();
  CHECK(error_of([&] { build_initial_state(cfg); }).first == ErrorKind::DimensionMismatch);
}

TEST_CASE("grid construction and indexing") {
  CHECK(error_of([] { Grid::make_1d(0, 1.0); }).first == ErrorKind::BadBounds);
  CHECK(error_of([] { Grid::make_1d(4, -1.0); }).first == ErrorKind::BadBounds);
  const std::vector<int> cells{4};
  const std::vector<double> lengths{1.0, 1.0};
  CHECK(error_of([&] { Grid::make(2, cells, lengths); }).first == ErrorKind::DimensionMismatch);

  const Grid g = Grid::make_2d(4, 3, 2.0, 1.5);
  CHECK(g.num_cells() == 12);
  CHECK(g.spacing(0) == 0.5);
  CHECK(g.spacing(1) == 0.5);
  CHECK(g.cell_volume() == 0.25);
  CHECK(g.ix(g.index(3, 2)) == 3);
  CHECK(g.iy(g.index(3, 2)) == 2);
  int interior = 0;
  g.for_each_interior_face([&](int, int, int, int) { ++interior; });
  CHECK(interior == 3 * 3 + 4 * 2);
}

TEST_CASE("discrete operators: divergence of a gradient sums to zero, laplacian of a line") {
  const Grid g = Grid::make_1d(10, 1.0);
  Field u(10);
  for (int i = 0; i < 10; ++i) u[i] = std::sin(3.0 * g.center(0, i)) + g.center(0, i);
  const Field lap = laplacian(g, u);
  CHECK(integrate(g, lap) == doctest::Approx(0.0).epsilon(1e-13));

  Field line(10);
  for (int i = 0; i < 10; ++i) line[i] = 2.0 * g.center(0, i);
  const Field lap_line = laplacian(g, line);
  for (int i = 1; i < 9; ++i) CHECK(lap_line[i] == doctest::Approx(0.0).epsilon(1e-12));
  const FaceField grad = face_gradient(g, line);
  CHECK(grad.normal[0].front() == 0.0);
  CHECK(grad.normal[0].back() == 0.0);
  CHECK(grad.normal[0][5] == doctest::Approx(2.0));
  CHECK(integrate(g, Field(10, 3.0)) == doctest::Approx(3.0));
}
