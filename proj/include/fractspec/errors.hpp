#pragma once

#include <stdexcept>
#include <string>

namespace fractspec {

/// Input rejected: violated invariant, malformed config, out-of-range value.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver or estimator could not produce a trustworthy value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fractspec
