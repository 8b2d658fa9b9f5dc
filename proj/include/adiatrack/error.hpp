#pragma once

#include <stdexcept>
#include <string>

namespace adiatrack {

/// Precondition or invariant violation in caller-supplied data.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure (singular system, iteration cap).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A declared schedule certificate does not hold at some step.
class CertificateViolation : public std::runtime_error {
 public:
  CertificateViolation(std::string bound, unsigned long long step, double measured,
                       double declared);
  const std::string& bound() const { return bound_; }
  unsigned long long step() const { return step_; }
  double measured() const { return measured_; }
  double declared() const { return declared_; }

 private:
  std::string bound_;
  unsigned long long step_;
  double measured_;
  double declared_;
};

}  // namespace adiatrack
