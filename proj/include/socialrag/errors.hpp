#pragma once

#include <stdexcept>
#include <string>

namespace socialrag {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed something the operation cannot accept (bad vector, empty list, unknown enum).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

/// An event breaks the channel log invariants (seq ordering, dangling target).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// Transport-level failure; the same call may succeed later.
class RetryableError : public Error {
 public:
  using Error::Error;
};

class ConnectorError : public RetryableError {
 public:
  using RetryableError::RetryableError;
};

/// Generation exhausted its retries without satisfying the hard constraints.
class GenerationFailed : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A transcript failed validation before replay started.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace socialrag
