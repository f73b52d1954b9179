#pragma once

#include <stdexcept>
#include <string>

namespace seqlab {

// Invalid parameters or configuration. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter lies outside a family's natural domain. Reported like a
// configuration error by the CLI.
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Malformed or inconsistent input data. Maps to CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite intermediate or failed root search. Maps to CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace seqlab
