#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gamow {

enum class ErrorCode {
  InvalidArgument,
  Overflow,
  ArrowOfTimeViolation,
  IndexOutOfRange,
  NonFinite,
  EmptyGrid,
  DivergentPoint,
  WeightLengthMismatch,
  BadGrid,
  NoSignal,
  NonConvergence,
  IllConditioned,
  AllFitsFailed,
  Parse,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// front-ends can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gamow
