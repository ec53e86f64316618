#include "claimnet/error.hpp"

namespace claimnet {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::IdenticalIds: return "IdenticalIds";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyIndex: return "EmptyIndex";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::UnknownClaimId: return "UnknownClaimId";
    case ErrorKind::UnknownClusterId: return "UnknownClusterId";
    case ErrorKind::MissingVerdict: return "MissingVerdict";
    case ErrorKind::MalformedVerdict: return "MalformedVerdict";
    case ErrorKind::IncompleteVerdicts: return "IncompleteVerdicts";
    case ErrorKind::IdSetMismatch: return "IdSetMismatch";
    case ErrorKind::TooFewItems: return "TooFewItems";
    case ErrorKind::WardMetricViolation: return "WardMetricViolation";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Validation: return "Validation";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::vector<std::string> details)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      details_(std::move(details)) {}

ParseError::ParseError(std::string source, std::size_t line,
                       const std::string& message, ErrorKind kind)
    : Error(kind,
            source + ":" + std::to_string(line) + ": " + message),
      source_(std::move(source)),
      line_(line) {}

}  // namespace claimnet
