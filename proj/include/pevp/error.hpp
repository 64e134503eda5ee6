#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pevp {

enum class ErrorKind {
  InvalidArgument,
  NonSimpleEigenvalue,
  MissingDerivative,
  Domain,
  SingularJacobian,
  NoConvergence,
  DegenerateEvaluation,
  Parse,
  Config,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is
/// what callers branch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Syntax or identifier error in an expression. `offset` is the 1-based
/// byte position at which the problem was detected (length + 1 for
/// unexpected end of input).
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error(ErrorKind::Parse,
              message + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised when the dense eigensolver gives up.
class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& message, long iterations)
      : Error(ErrorKind::NoConvergence, message), iterations_(iterations) {}

  long iterations() const noexcept { return iterations_; }

 private:
  long iterations_;
};

}  // namespace pevp
