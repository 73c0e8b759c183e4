#pragma once

#include <stdexcept>
#include <string>

namespace safebench {

/// Raised when a caller breaks a documented precondition (dimension
/// mismatch, non-finite input, wrong filter kind, empty input).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Obstacle rejection sampling ran out of attempts.
class SceneGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed trace data (e.g. a pairwise block of the wrong size).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration file or command-line values that cannot be used.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failure; the message always carries the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}
}  // namespace detail

}  // namespace safebench
