#include "msdiff/errors.hpp"

namespace msdiff {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorKind::AsymmetricTable: return "AsymmetricTable";
    case ErrorKind::BadBounds: return "BadBounds";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ProfileOutOfBounds: return "ProfileOutOfBounds";
    case ErrorKind::NumericallySingular: return "NumericallySingular";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::IncompatibleRHS: return "IncompatibleRHS";
    case ErrorKind::BlockStructureViolation: return "BlockStructureViolation";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::TrajectoryExit: return "TrajectoryExit";
    case ErrorKind::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::string field)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      field_(std::move(field)) {}

}  // namespace msdiff
