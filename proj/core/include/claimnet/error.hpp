#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace claimnet {

enum class ErrorKind {
  IdenticalIds,
  DimensionMismatch,
  ZeroVector,
  NonFiniteValue,
  EmptyInput,
  EmptyIndex,
  DuplicateId,
  UnknownClaimId,
  UnknownClusterId,
  MissingVerdict,
  MalformedVerdict,
  IncompleteVerdicts,
  IdSetMismatch,
  TooFewItems,
  WardMetricViolation,
  InvalidArgument,
  Validation,
  Parse,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library. `details` carries machine-readable
// payload such as the offending ids of an IdSetMismatch or the pair that a
// MissingVerdict refers to.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::vector<std::string> details = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorKind kind_;
  std::vector<std::string> details_;
};

// Parse failure with the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& message,
             ErrorKind kind = ErrorKind::Parse);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

}  // namespace claimnet
