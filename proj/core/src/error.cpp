#include "tourrec/error.hpp"

namespace tourrec {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvalidCounts: return "InvalidCounts";
    case ErrorCode::UnknownPlaceId: return "UnknownPlaceId";
    case ErrorCode::UnknownVisitorId: return "UnknownVisitorId";
    case ErrorCode::FoldsTooLarge: return "FoldsTooLarge";
    case ErrorCode::ItemOutOfRange: return "ItemOutOfRange";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyRuns: return "EmptyRuns";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidCoordinate: return "InvalidCoordinate";
    case ErrorCode::EmptyRecommendations: return "EmptyRecommendations";
    case ErrorCode::ZeroBaseline: return "ZeroBaseline";
    case ErrorCode::EmptyRows: return "EmptyRows";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
  }
  return "Unknown";
}

}  // namespace tourrec
