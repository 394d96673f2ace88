#pragma once

#include <stdexcept>
#include <string>

namespace msgclass {

// Base of everything the library throws on bad input or failed numerics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or usage (CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent data (CLI exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

// A required column is missing from an input file.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

// Training diverged or produced a non-finite quantity (CLI exit code 3).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace msgclass
