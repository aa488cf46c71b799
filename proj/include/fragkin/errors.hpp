#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fragkin {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Non-finite value, unresolved transform noise, or stalled step control.
class NumericalFault : public Error {
 public:
  using Error::Error;
};

/// Checkpoint or table file that fails validation.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

struct ConfigIssue {
  int line = 0;  // 0 when not tied to a line
  std::string message;
};

/// Every problem found in a configuration text, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);

  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

}  // namespace fragkin
