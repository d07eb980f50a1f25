#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stopslam {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: mismatched sizes, unknown keys, unusable parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numeric argument outside its mathematical domain (negative weight, NaN, asymmetric matrix).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The graph (or the positive-weight part of it) does not connect every node to the anchor.
class DisconnectedGraphError : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration refused because the input is too large.
class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The simulator reached a physically impossible state.
class SimulationFault : public Error {
 public:
  using Error::Error;
};

/// A stopping criterion that needs data the run cannot provide.
class CriterionUnavailableError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace stopslam
