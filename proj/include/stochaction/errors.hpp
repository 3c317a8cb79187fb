#pragma once

#include <stdexcept>
#include <string>

namespace stochaction {

// Base for every error raised by the library. `module()` names the component
// that failed so the CLI can report it with scenario context.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

// Bad inputs: mismatched grids, out-of-range parameters, malformed configs.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// A configuration value failed validation. `field()` is the dotted key path.
class ValidationError : public ConfigurationError {
 public:
  ValidationError(std::string module, std::string field, const std::string& what)
      : ConfigurationError(std::move(module), field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A mathematical precondition does not hold (nonpositive weights,
// evaluation outside the grid).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed (singular pivot, residual too large,
// degenerate state).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace stochaction
