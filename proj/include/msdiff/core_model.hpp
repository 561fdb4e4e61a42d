#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "msdiff/grid.hpp"

namespace msdiff {

/// Threshold below which a recovered last-species concentration counts as
/// a genuine negativity event rather than round-off.
inline constexpr double kTolNeg = 1e-12;

struct Bounds {
  double c_min = 0.0;
  double c_max = 0.0;
  double T_min = 0.0;
  double T_max = 0.0;
};

/// Coefficient table as supplied by the user. Either triangle may be given;
/// an off-diagonal zero means "not given" when its mirror entry is set.
struct RawMixture {
  int n = 0;
  std::vector<std::vector<double>> K;
  double alpha = 0.0;
  Bounds bounds;
};

/// Validated mixture: symmetric friction table with strictly positive
/// off-diagonal entries and a zero diagonal.
struct MixtureSpec {
  int n = 0;
  Mat K;
  double alpha = 0.0;
  Bounds bounds;

  double k(int i, int j) const { return K(i, j); }
};

/// Throws Error(NonPositiveCoefficient | AsymmetricTable | BadBounds |
/// DimensionMismatch); Error::field() names the entry, e.g. "K[0][1]".
MixtureSpec validate_mixture(const RawMixture& raw);

// Initial-profile presets. Positions are in domain coordinates.
struct UniformProfile {
  double value = 0.0;
};
/// mean + amplitude * prod_a cos(mode[a] * pi * x_a / L_a); axes with mode 0 are flat.
struct CosineProfile {
  double mean = 0.0;
  double amplitude = 0.0;
  std::array<int, 2> mode{1, 0};
};
/// floor + peak * exp(-|x - center|^2 / (2 width^2)).
struct GaussianProfile {
  std::array<double, 2> center{0.5, 0.5};
  double width = 0.1;
  double floor = 0.0;
  double peak = 1.0;
};
/// left for x_0 < interface, right otherwise.
struct StepProfile {
  double left = 0.0;
  double right = 0.0;
  double interface = 0.5;
};
using Profile = std::variant<UniformProfile, CosineProfile, GaussianProfile, StepProfile>;

double evaluate_profile(const Profile& profile, std::array<double, 2> x);

/// Samples the profile at cell centers.
Field sample_profile(const Profile& profile, const Grid& grid);

enum class ConcentrationScheme { Explicit, SemiImplicit };
enum class TemperatureScheme { Upwind, Characteristics };

struct TimePolicy {
  double t_end = 0.0;
  std::optional<double> fixed_dt;
  double cfl_safety = 1.0;
};

struct OutputPolicy {
  std::string dir = "out";
  std::vector<double> snapshot_times;
  int every_n_steps = 0;
};

struct ScenarioConfig {
  MixtureSpec mixture;
  Grid grid;
  std::vector<Profile> species;  // n entries
  Profile temperature = UniformProfile{1.0};
  TimePolicy time;
  ConcentrationScheme concentration_scheme = ConcentrationScheme::Explicit;
  TemperatureScheme temperature_scheme = TemperatureScheme::Characteristics;
  OutputPolicy output;
};

/// The evolving unknowns. c_prime holds species 1..n-1; species n is
/// recovered from the total concentration.
struct FieldState {
  double t = 0.0;
  std::vector<Field> c_prime;
  Field c_tot;
  Field T;
};

/// Samples all n species and the temperature at cell centers, sets
/// c_tot to the sum over all n species, keeps the first n-1 in c_prime.
/// Throws Error(ProfileOutOfBounds) with field "initial.species[i]" or
/// "initial.temperature" when a sampled field leaves its admissible range.
FieldState build_initial_state(const ScenarioConfig& config);

}  // namespace msdiff
