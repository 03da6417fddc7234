#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wstl {

enum class ErrorCode {
  Domain,
  Shape,
  DegenerateWeights,
  OutOfRange,
  EmptyClass,
  Config,
  Format,
  Parse,
  Empty,
  Io,
  Schema,
  UnsupportedVersion,
  Integrity,
  Stratification,
  Usage,
};

/// Machine-parsable tag for an error code, e.g. "E_IO".
std::string_view error_tag(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

} // namespace wstl
