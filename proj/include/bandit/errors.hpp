#pragma once

#include <stdexcept>
#include <string>

namespace bandit {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration or invalid input (bad parameters, ordering
/// violations, malformed config files). CLI exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Numerical failure (NaN/Inf encountered, instability detected). Exit code 3.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

/// Resource bound exceeded (state space, memory guards). Exit code 4.
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& msg) : Error(msg) {}
};

}  // namespace bandit
