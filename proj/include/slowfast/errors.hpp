#pragma once

#include <stdexcept>
#include <string>

namespace slowfast {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite derivative, bracket or quadrature result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Point outside the system's declared validity box.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

class MaxStepsExceeded : public IntegrationError {
 public:
  MaxStepsExceeded(const std::string& what, double last_time)
      : IntegrationError(what), last_time_(last_time) {}
  double last_time() const { return last_time_; }

 private:
  double last_time_;
};

class StepSizeUnderflow : public IntegrationError {
 public:
  StepSizeUnderflow(const std::string& what, double last_time)
      : IntegrationError(what), last_time_(last_time) {}
  /// Time of the last accepted step.
  double last_time() const { return last_time_; }

 private:
  double last_time_;
};

/// Raised only when hypothesis checks run in strict mode.
class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

/// det A drifted away from 1 for a quadratic-family system.
class DegenerateFamily : public Error {
 public:
  using Error::Error;
};

class SlopeUndefined : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace slowfast
