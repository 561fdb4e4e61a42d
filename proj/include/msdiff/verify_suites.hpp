#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "msdiff/core_model.hpp"
#include "msdiff/verify.hpp"

namespace msdiff {

/// One pinned pass/fail comparison of a measured value against a limit.
struct Check {
  enum class Sense { AtMost, AtLeast };

  std::string name;
  double value = 0.0;
  double limit = 0.0;
  Sense sense = Sense::AtMost;

  bool pass() const;
};

struct SuiteResult {
  std::string name;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, ConvergenceTable>> tables;
  double seconds = 0.0;

  bool pass() const;
  /// nullptr when no check has this name.
  const Check* find(const std::string& check_name) const;
};

/// Name of the per-scenario check recording
/// min over steps of (min Re eig(T B) - min(T) / eta).
inline constexpr const char* kEllipticityCheck = "ellipticity_margin";
inline constexpr double kEllipticityTol = 1e-10;

/// Random admissible point for the algebraic batteries: n in {2,3,4,6},
/// log-uniform k_ij in [0.1, 10], c_tot inside [c_min, c_max].
struct AlgebraSample {
  MixtureSpec spec;
  Vec c;
};

/// Deterministic sequence of `count` samples for `seed`.
std::vector<AlgebraSample> algebra_samples(std::uint64_t seed, int count);

/// Eigenvalues of -F, F0 and B against the spectral bounds.
SuiteResult spectra_suite(std::uint64_t seed = 0, int samples = 1000);

/// Column sums of F and the block form of X^{-1} F X.
SuiteResult conjugation_suite(std::uint64_t seed = 0, int samples = 1000);

/// Decay of a cosine eigenmode under the explicit heat step on 32/64/128
/// cells against exp(-alpha pi^2 t / L^2).
SuiteResult heat_order_suite();

/// Upwind versus characteristics temperature on a cosine scenario over
/// `levels` joint refinements starting at 32 cells, plus the pure-source
/// case against exp(2 sigma t / 3).
SuiteResult temperature_crossval_suite(int levels = 4);

/// Reduced solver versus the full-system oracle on the generic n = 3
/// scenario, 64 cells and `levels - 1` halvings of dx and dt.
SuiteResult equivalence_suite(int levels = 3);

/// Equal friction coefficients with uniform T and c_tot: species modes
/// decay with diffusivity T / (k c_tot).
SuiteResult equal_k_suite();

/// Cosine-mode runs in 1D and 2D to t = 0.5: c_tot bounds and c_tot mass.
SuiteResult max_principle_suite();

/// Scenario builders shared with the tests.
ScenarioConfig equivalence_scenario(int cells);
ScenarioConfig equal_k_scenario(int cells);
ScenarioConfig max_principle_scenario(int dim);

/// Runs a named suite: spectra, conjugation, equivalence, convergence
/// (heat order and temperature cross-validation) or all. Throws
/// Error(ValidationError) for any other name.
std::vector<SuiteResult> run_named_suite(const std::string& name, std::uint64_t seed, int samples);

}  // namespace msdiff
