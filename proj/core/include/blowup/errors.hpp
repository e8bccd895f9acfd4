#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

/// Argument outside the domain of an operation (table range, grid extent, t <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StepSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time stepper produced a non-finite value; carries the first offending location.
class SolverBlowUp : public std::runtime_error {
 public:
  SolverBlowUp(double s, double y, const std::string& what_prefix = "non-finite value");
  double s() const noexcept { return s_; }
  double y() const noexcept { return y_; }

 private:
  double s_;
  double y_;
};

}  // namespace blowup
