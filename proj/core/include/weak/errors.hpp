#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace weak {

/// Inconsistent inputs: mismatched truncation degrees, wrong dimensions,
/// invalid parameter sets.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A Runge-Kutta stage produced a non-finite state.
class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(std::size_t stage, const std::string& what)
      : std::runtime_error(what), stage_(stage) {}

  std::size_t stage() const noexcept { return stage_; }

 private:
  std::size_t stage_;
};

}  // namespace weak
