#pragma once

#include <stdexcept>
#include <string>

namespace conewave {

// Invalid input, violated precondition or malformed configuration.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A quadrature, search or acceptance tolerance could not be met.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested regularity space is outside the admissible Banach scale.
struct UnsupportedSpaceError : ConfigError {
  using ConfigError::ConfigError;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ConfigError(what);
}

}  // namespace conewave
