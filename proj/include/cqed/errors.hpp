#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

// Bad or inconsistent device/model parameters (invalid dimension, missing
// coupling, dispersive breakdown, ...).
struct ModelError : std::invalid_argument {
  explicit ModelError(const std::string& what) : std::invalid_argument(what) {}
};

// Configuration file / CLI input problems. Mapped to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures (integrator trace drift, fit breakdown, ...). Mapped
// to exit code 3.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cqed
