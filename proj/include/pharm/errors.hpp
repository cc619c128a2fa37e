#pragma once

#include <stdexcept>
#include <string>

namespace pharm {

enum class ErrorKind {
  InvalidArgument,
  DegeneratePoint,
  StepSizeUnderflow,
  BracketNotFound,
  NonConvergent,
  TailNotConverged,
  PoleSingularity,
  NonCriticalProfile,
  GridTooCoarse,
  EigenNotConverged,
};

const char* to_string(ErrorKind kind);

/// Numerical failure carrying a machine-readable kind.
class NumericError : public std::runtime_error {
 public:
  NumericError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pharm
