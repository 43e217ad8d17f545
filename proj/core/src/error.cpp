#include "faceval/error.hpp"

namespace faceval {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::UnknownGroup: return "UnknownGroup";
    case ErrorCode::GroupMismatch: return "GroupMismatch";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonPositiveParam: return "NonPositiveParam";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::EmptyField: return "EmptyField";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::NameSetMismatch: return "NameSetMismatch";
    case ErrorCode::DuplicateExtractor: return "DuplicateExtractor";
    case ErrorCode::EmptyReferenceList: return "EmptyReferenceList";
    case ErrorCode::AllDegenerate: return "AllDegenerate";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::JsonSyntax: return "JsonSyntax";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::NonFinitePayload: return "NonFinitePayload";
    case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
    case ErrorCode::TrailingBytes: return "TrailingBytes";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Error";
}

}  // namespace faceval
