#pragma once

#include <stdexcept>
#include <string>

namespace kpp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exponent left the representable range of a double exponential.
struct OverflowError : Error {
  using Error::Error;
};

// An iterative solver failed to bracket or converge.
struct ConvergenceError : Error {
  using Error::Error;
};

// An operation was invoked outside the parameter region where its
// defining formula is valid.
struct RegimeError : Error {
  using Error::Error;
};

// A malformed descriptor or run configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace kpp
