#include "glucoscope/domain/error.hpp"

namespace glucoscope {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::OutOfOrder: return "OutOfOrder";
    case ErrorCode::StaleData: return "StaleData";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::OutOfSpan: return "OutOfSpan";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::ValidationFailure: return "ValidationFailure";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(std::move(detail)) {}

}  // namespace glucoscope
