#pragma once

#include <stdexcept>
#include <string>

namespace slsfem {

/// Malformed or unknown configuration input (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally valid input that violates a precondition, e.g. the
/// noise regularity condition beta < s - 1/2 (CLI exit code 3).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Solver or quadrature failure that should never occur for valid
/// inputs (CLI exit code 4).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace slsfem
