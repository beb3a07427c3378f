#pragma once

#include <stdexcept>
#include <string>

namespace rjlt {

// Invalid model/configuration parameters.  Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data that violates a documented precondition (unsorted times,
// misaligned grids, malformed files).  Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate numerical outcome (non-positive variance everywhere, empty
// spectrum).  Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rjlt
