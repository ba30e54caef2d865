#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ucmab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Rejected configuration (reward spec, bandit config, experiment file).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Training data cannot support a fit (e.g. one arm missing).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation invoked on an object in the wrong state.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Environment parameters that break a probability invariant.
class SpecificationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dataset ingestion failure; carries the 1-based line number (0 = header/file).
class IngestionError : public std::runtime_error {
 public:
  IngestionError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ucmab
