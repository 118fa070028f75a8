#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sineflow {

enum class ErrorKind {
  InvalidInput,
  EmbeddednessViolation,
  ResolutionError,
  ConstructionError,
  DomainError,
  EmptyCurve,
  OutOfHypothesis,
  Extinct,
  HypothesisViolation,
  WindowTooWide,
  InvalidState,
  StepRejected,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every contract failure in the library. The kind is
/// stable and is what callers (and the CLI) switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace sineflow
