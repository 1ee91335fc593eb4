#include "echoroom/error.hpp"

namespace echoroom {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvexInput: return "NonConvexInput";
    case ErrorCode::DegenerateEdge: return "DegenerateEdge";
    case ErrorCode::UnboundedRoom: return "UnboundedRoom";
    case ErrorCode::PointOutsideRoom: return "PointOutsideRoom";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::MaskedInput: return "MaskedInput";
    case ErrorCode::InsufficientObservations: return "InsufficientObservations";
    case ErrorCode::AmbiguousConfiguration: return "AmbiguousConfiguration";
    case ErrorCode::InconsistentData: return "InconsistentData";
    case ErrorCode::InfeasibleCount: return "InfeasibleCount";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::DegenerateShear: return "DegenerateShear";
    case ErrorCode::PointLeftRoom: return "PointLeftRoom";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      index_(index) {}

}  // namespace echoroom
