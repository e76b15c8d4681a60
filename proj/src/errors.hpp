#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace fc {

// Base class for all toolkit failures. The C API maps each subclass onto a
// status code, so new error kinds need a matching entry in capi.cpp.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violation: bad index, mismatched sizes, invalid parameter.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Evaluation outside the mathematical domain (metric boundary, sqrt of a
// non-positive value, division by zero). Carries the offending value.
class DomainError : public Error {
 public:
  DomainError(const std::string& msg, double offending)
      : Error(msg + " (offending value " + short_repr(offending) + ")"),
        offending_value(offending) {}
  explicit DomainError(const std::string& msg)
      : Error(msg), offending_value(0.0) {}

  double offending_value;

 private:
  static std::string short_repr(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
  }
};

// Fundamental tensor not positive definite at the evaluation point.
class ConvexityError : public Error {
 public:
  ConvexityError(const std::string& msg, double min_eigenvalue)
      : Error(msg), min_eig(min_eigenvalue) {}

  double min_eig;
};

// Quadrature or linear algebra failed to converge within its budget.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Least-squares system too degenerate to estimate a constant.
class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fc
