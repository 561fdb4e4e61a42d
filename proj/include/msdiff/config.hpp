#pragma once

#include <filesystem>
#include <string>

#include "msdiff/core_model.hpp"

namespace msdiff {

/// Reads and validates a scenario document. Throws Error(ParseError) for
/// malformed JSON (message carries line and column) and for unknown keys;
/// Error(ValidationError) with a dotted field path (e.g. "mixture.K[0][1]")
/// for missing, mistyped or invalid values.
ScenarioConfig load_config(const std::filesystem::path& path);

/// Same as load_config for an in-memory document.
ScenarioConfig parse_config(const std::string& text);

/// Copy of `config` with every axis refined by `factor` (cell counts
/// multiplied). A fixed dt is divided by factor^2 to keep explicit
/// diffusion stable.
ScenarioConfig refine(const ScenarioConfig& config, int factor);

}  // namespace msdiff
