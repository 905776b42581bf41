#pragma once

#include <stdexcept>
#include <string>

namespace inertia {

/// Thrown when an iteration produces non-finite values or the function gap
/// blows past the divergence guard. The CLI maps this to exit code 3.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on malformed or inconsistent experiment configuration.
/// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace inertia
