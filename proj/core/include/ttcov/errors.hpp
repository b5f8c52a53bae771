#pragma once

#include <stdexcept>
#include <string>

namespace ttcov {

// Invalid arguments (bad modes, ranks, shapes) surface as std::invalid_argument.

/// Non-finite or otherwise unusable numeric input.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent benchmark / CLI configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure reading or writing files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ttcov
