#pragma once

#include <stdexcept>
#include <string>

namespace bufalloc {

enum class Errc {
  UnmatchedMessage,
  SelfMessage,
  CausalityCycle,
  AssignmentShapeMismatch,
  IllegalMove,
  StateLimitExceeded,
  DepthUndefined,
  BadArity,
  ParseError,
};

/// Library error type. The code tells callers (and the CLI exit-code
/// mapping) which contract was violated.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

const char* errc_name(Errc code);

}  // namespace bufalloc
