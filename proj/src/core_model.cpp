#include "msdiff/core_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "msdiff/errors.hpp"

namespace msdiff {

namespace {

std::string entry_name(int i, int j) {
  return "K[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

void check_bounds(const Bounds& b) {
  if (!(b.c_min > 0.0)) throw Error(ErrorKind::BadBounds, "c_min must be positive", "bounds.c_min");
  if (!(b.c_max >= b.c_min))
    throw Error(ErrorKind::BadBounds, "c_max must be >= c_min", "bounds.c_max");
  if (!(b.T_min > 0.0)) throw Error(ErrorKind::BadBounds, "T_min must be positive", "bounds.T_min");
  if (!(b.T_max >= b.T_min))
    throw Error(ErrorKind::BadBounds, "T_max must be >= T_min", "bounds.T_max");
  if (!std::isfinite(b.c_max) || !std::isfinite(b.T_max))
    throw Error(ErrorKind::BadBounds, "bounds must be finite", "bounds");
}

}  // namespace

MixtureSpec validate_mixture(const RawMixture& raw) {
  const int n = raw.n;
  if (n < 2 || n > kMaxSpecies)
    throw Error(ErrorKind::DimensionMismatch,
                "species count must be in [2, " + std::to_string(kMaxSpecies) + "]", "n");
  if (static_cast<int>(raw.K.size()) != n)
    throw Error(ErrorKind::DimensionMismatch, "K must have n rows", "K");
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(raw.K[i].size()) != n)
      throw Error(ErrorKind::DimensionMismatch, "K must have n columns", "K[" + std::to_string(i) + "]");
  if (!(raw.alpha > 0.0) || !std::isfinite(raw.alpha))
    throw Error(ErrorKind::BadBounds, "alpha must be positive", "alpha");
  check_bounds(raw.bounds);

  MixtureSpec spec;
  spec.n = n;
  spec.alpha = raw.alpha;
  spec.bounds = raw.bounds;
  spec.K = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double upper = raw.K[i][j];
      const double lower = raw.K[j][i];
      if (!std::isfinite(upper) || !std::isfinite(lower))
        throw Error(ErrorKind::NonPositiveCoefficient, "non-finite coefficient", entry_name(i, j));
      if (upper < 0.0)
        throw Error(ErrorKind::NonPositiveCoefficient, "negative coefficient", entry_name(i, j));
      if (lower < 0.0)
        throw Error(ErrorKind::NonPositiveCoefficient, "negative coefficient", entry_name(j, i));
      if (upper != 0.0 && lower != 0.0 && upper != lower) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "k_" << i << j << " = " << upper << " differs from k_" << j << i << " = " << lower;
        throw Error(ErrorKind::AsymmetricTable, msg.str(), entry_name(i, j));
      }
      const double k = upper != 0.0 ? upper : lower;
      if (!(k > 0.0))
        throw Error(ErrorKind::NonPositiveCoefficient, "off-diagonal coefficient must be positive",
                    entry_name(i, j));
      spec.K(i, j) = k;
      spec.K(j, i) = k;
    }
  }
  return spec;
}

double evaluate_profile(const Profile& profile, std::array<double, 2> x) {
  // Cosine modes use the unit box; sample_profile rescales positions.
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, UniformProfile>) {
          return p.value;
        } else if constexpr (std::is_same_v<P, CosineProfile>) {
          double v = 1.0;
          for (int a = 0; a < 2; ++a)
            if (p.mode[a] != 0) v *= std::cos(p.mode[a] * std::numbers::pi * x[a]);
          return p.mean + p.amplitude * v;
        } else if constexpr (std::is_same_v<P, GaussianProfile>) {
          const double dx = x[0] - p.center[0];
          const double dy = x[1] - p.center[1];
          return p.floor + p.peak * std::exp(-(dx * dx + dy * dy) / (2.0 * p.width * p.width));
        } else {
          return x[0] < p.interface ? p.left : p.right;
        }
      },
      profile);
}

Field sample_profile(const Profile& profile, const Grid& grid) {
  Field u(grid.num_cells());
  const bool cosine = std::holds_alternative<CosineProfile>(profile);
  for (int c = 0; c < grid.num_cells(); ++c) {
    std::array<double, 2> x{grid.center(0, grid.ix(c)), 0.0};
    if (grid.dim() == 2) {
      x[1] = grid.center(1, grid.iy(c));
    } else if (const auto* g = std::get_if<GaussianProfile>(&profile)) {
      x[1] = g->center[1];  // a 1D Gaussian has no transverse falloff
    }
    if (cosine) {
      x[0] /= grid.length(0);
      if (grid.dim() == 2) x[1] /= grid.length(1);
    }
    u[c] = evaluate_profile(profile, x);
  }
  return u;
}

FieldState build_initial_state(const ScenarioConfig& config) {
  const MixtureSpec& spec = config.mixture;
  const Grid& grid = config.grid;
  if (static_cast<int>(config.species.size()) != spec.n)
    throw Error(ErrorKind::DimensionMismatch, "need one initial profile per species",
                "initial.species");

  FieldState state;
  state.t = 0.0;
  state.c_tot.assign(grid.num_cells(), 0.0);
  for (int i = 0; i < spec.n; ++i) {
    Field ci = sample_profile(config.species[i], grid);
    const std::string where = "initial.species[" + std::to_string(i) + "]";
    for (double v : ci) {
      if (!std::isfinite(v)) throw Error(ErrorKind::ProfileOutOfBounds, "non-finite value", where);
      if (v < 0.0)
        throw Error(ErrorKind::ProfileOutOfBounds, "negative concentration " + std::to_string(v),
                    where);
    }
    for (int c = 0; c < grid.num_cells(); ++c) state.c_tot[c] += ci[c];
    if (i + 1 < spec.n) state.c_prime.push_back(std::move(ci));
  }
  for (double v : state.c_tot)
    if (v < spec.bounds.c_min || v > spec.bounds.c_max)
      throw Error(ErrorKind::ProfileOutOfBounds,
                  "total concentration " + std::to_string(v) + " outside [c_min, c_max]",
                  "initial.species");

  state.T = sample_profile(config.temperature, grid);
  for (double v : state.T)
    if (!(v >= spec.bounds.T_min && v <= spec.bounds.T_max))
      throw Error(ErrorKind::ProfileOutOfBounds,
                  "temperature " + std::to_string(v) + " outside [T_min, T_max]",
                  "initial.temperature");
  return state;
}

}  // namespace msdiff
