#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace faceval {

/// Error classes raised by the library. The CLI prints the class name as
/// the prefix of its single-line diagnostic and maps it to an exit code.
enum class ErrorCode {
  // geometry / landmark-core
  CountMismatch,
  DegenerateGeometry,
  NonFinite,
  UnknownGroup,
  GroupMismatch,
  GroupTooSmall,
  InvalidWeights,
  // oracle
  NoConvergence,
  InvalidConfig,
  // mask pipeline
  NonPositiveParam,
  DimensionMismatch,
  ImageTooSmall,
  EmptyField,
  ValueOutOfRange,
  // identity metrics
  LengthMismatch,
  ZeroNorm,
  EmptyVector,
  NameSetMismatch,
  DuplicateExtractor,
  // evaluator
  EmptyReferenceList,
  AllDegenerate,
  EmptyBatch,
  // formats
  JsonSyntax,
  SchemaViolation,
  BadMagic,
  MalformedHeader,
  TruncatedPayload,
  NonFinitePayload,
  UnsupportedMaxval,
  TrailingBytes,
  IoError,
  // cli
  UsageError,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace faceval
