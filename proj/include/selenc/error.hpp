#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selenc {

enum class ErrorCode {
  NoStartCode,
  EscapingViolation,
  MalformedEscape,
  OutOfBits,
  OutOfRange,
  BadKeyLength,
  CounterOverflow,
  WrongKey,
  OrdinalOutOfRange,
  BadMagic,
  BadVersion,
  MalformedHeader,
  BadHex,
  EmptyPassphrase,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable error kind. All library failures
/// surface as this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace selenc
