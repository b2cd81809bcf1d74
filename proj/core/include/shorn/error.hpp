#pragma once

#include <stdexcept>
#include <string>

namespace shorn {

enum class ErrorKind {
  InvalidInput,        // malformed or non-hermitian data, bad sizes
  ResolutionMismatch,  // operands live on different grids
  Precondition,        // a stated hypothesis does not hold
  NotMajorized,        // target is not majorized by the source
  Infeasible,          // construction impossible at this resolution
  EigenFailure,        // eigensolver did not converge
  IterationLimit,      // outer loop budget exhausted
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace shorn
