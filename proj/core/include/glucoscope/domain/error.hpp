#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glucoscope {

enum class ErrorCode {
  InvariantViolation,
  OutOfOrder,
  StaleData,
  NonFiniteState,
  ConfigInvalid,
  OutOfSpan,
  StorageFailure,
  ValidationFailure,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above; the
// detail string names the violated constraint (e.g. "carbs >= 0").
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace glucoscope
