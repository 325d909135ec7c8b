#pragma once

#include <stdexcept>
#include <string>

namespace vtrack {

/// Malformed configuration input. Message carries "file:line:" where known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
  ConfigError(const std::string& file, int line, const std::string& msg)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg) {}
};

/// Model evaluated outside its domain of validity: parameter invariant
/// violation, speed below the singular threshold, near-singular decoupling.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state variable left the finite range during integration.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent data streams: sample-time drift, window
/// misalignment, missing CSV columns, ill-posed track geometry.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vtrack
