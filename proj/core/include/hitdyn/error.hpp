#pragma once

#include <stdexcept>
#include <string>

namespace hitdyn {

enum class ErrorCode {
  SpaceMismatch,
  NetTooLarge,
  BadSymbol,
  ResolutionTooCoarse,
  BudgetExceeded,
  DegenerateLipschitz,
  DepthOverflow,
  NoGap,
  BasinCheckFailed,
  TransitionNotFound,
  ZeroVector,
  NotInvariant,
  NotHyperbolic,
  InvalidArgument,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hitdyn
