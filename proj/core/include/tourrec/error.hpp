#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tourrec {

/// Failure classes raised by the library. Each maps to one CLI diagnostic.
enum class ErrorCode {
  MalformedRow,
  DuplicateId,
  EmptyFile,
  Io,
  InvalidCounts,
  UnknownPlaceId,
  UnknownVisitorId,
  FoldsTooLarge,
  ItemOutOfRange,
  InvalidThreshold,
  InvalidArgument,
  EmptyRuns,
  DegenerateRange,
  KTooLarge,
  DimensionMismatch,
  InvalidCoordinate,
  EmptyRecommendations,
  ZeroBaseline,
  EmptyRows,
  LengthMismatch,
  Empty,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tourrec
