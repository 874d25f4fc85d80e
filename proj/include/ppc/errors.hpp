#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class NotMMatrix : public Error {
 public:
  using Error::Error;
};

class OrderTooHigh : public Error {
 public:
  using Error::Error;
};

/// A signal left its performance funnel: |value| >= bound at time t.
class FunnelViolation : public Error {
 public:
  FunnelViolation(double value, double bound, double t, const std::string& what_signal = "error");

  double value() const { return value_; }
  double bound() const { return bound_; }
  double time() const { return time_; }

 private:
  double value_;
  double bound_;
  double time_;
};

/// Nussbaum evaluation outside the range where e^(chi^2) is representable.
class Overflow : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class GainSignFlip : public Error {
 public:
  using Error::Error;
};

class GainOutOfBounds : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

class InfeasibleInitialCondition : public Error {
 public:
  using Error::Error;
};

class GuardTripped : public Error {
 public:
  using Error::Error;
};

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

/// Config/trace parse failure. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, const std::string& key = {});

  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

}  // namespace ppc
