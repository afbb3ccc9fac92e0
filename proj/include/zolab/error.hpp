#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zolab {

enum class ErrorCode {
  InvalidArgument,
  BallTooLarge,
  MalformedPBM,
  NonSquare,
  SyntaxError,
  UnboundVariable,
  ShadowedVariable,
  UnassignedFreeVariable,
  WorkBudgetExceeded,
  ImageTooSmall,
  RadiusTooLarge,
  TooLargeToEnumerate,
  UnsupportedRate,
  MalformedDocument,
};

std::string_view to_string(ErrorCode code);

// Resource refusals (budgets, enumeration caps) as opposed to bad input.
bool is_resource_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error(ErrorCode::SyntaxError,
              "at offset " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace zolab
