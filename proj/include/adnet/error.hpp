#pragma once

#include <stdexcept>
#include <string>

namespace adnet {

// Exit-code mapping used by the CLI: ValidationError and subclasses -> 1,
// FormatError and subclasses -> 2.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

class DimensionError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

class FormatError : public Error {
public:
  using Error::Error;
};

class IoError : public FormatError {
public:
  using FormatError::FormatError;
};

}  // namespace adnet
