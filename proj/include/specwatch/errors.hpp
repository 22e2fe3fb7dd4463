#pragma once

#include <stdexcept>
#include <string>

namespace specwatch {

// Bad or inconsistent configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A required input file or directory is absent (CLI exit code 3).
struct MissingInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// NaN/Inf detected where finite values are required (CLI exit code 4).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem/serialization failure other than a missing input.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace specwatch
