#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace msdiff {

enum class ErrorKind {
  NonPositiveCoefficient,
  AsymmetricTable,
  BadBounds,
  DimensionMismatch,
  ProfileOutOfBounds,
  NumericallySingular,
  EigenFailure,
  IncompatibleRHS,
  BlockStructureViolation,
  CFLViolation,
  TrajectoryExit,
  LinearSolveFailure,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. `field` optionally names the offending input
/// location relative to its owning object (e.g. "K[0][1]").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

}  // namespace msdiff
