#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace echoroom {

enum class ErrorCode {
  InvalidArgument,
  NonConvexInput,
  DegenerateEdge,
  UnboundedRoom,
  PointOutsideRoom,
  NegativeDistance,
  MaskedInput,
  InsufficientObservations,
  AmbiguousConfiguration,
  InconsistentData,
  InfeasibleCount,
  UnsupportedDimension,
  DegenerateShear,
  PointLeftRoom,
  LabelMismatch,
  ParseError,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` identifies the failure class
/// and `index()` carries the offending element (measurement, wall, row) if any.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace echoroom
