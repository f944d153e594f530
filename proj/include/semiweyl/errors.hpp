#pragma once

#include <stdexcept>
#include <string>

namespace semiweyl {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on the inputs was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure could not reach its tolerance. `estimate` carries the
// error estimate that was achieved.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double estimate)
      : Error(what + " (estimate " + std::to_string(estimate) + ")"), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

// Malformed scenario configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace semiweyl
