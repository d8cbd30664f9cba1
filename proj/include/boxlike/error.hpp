#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boxlike {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation
/// (digit out of range, x outside [0,1], non-probability weights, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition (missing moments, mismatched
/// scales, sampler output outside [0,1], ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The requested depth or word count would exceed the configured budget.
/// Thrown before any allocation happens.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A materialized tree is too shallow for the requested stopping sets.
class InsufficientDepthError : public ContractError {
 public:
  InsufficientDepthError(std::size_t required, std::size_t available)
      : ContractError("tree depth " + std::to_string(available) +
                      " is insufficient; required depth is " +
                      std::to_string(required)),
        required_(required),
        available_(available) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t available() const noexcept { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

/// The dimension equation could not be bracketed on [1, 2].
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Too few usable scales for a log-log regression.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Numerical self-check failed (e.g. sibling continuity during extraction).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid model configuration. `line` is 1-based, 0 if unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace boxlike
