#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace projflat {

inline std::string format_residual(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A field or φ was evaluated on its singular locus (division by zero,
// negative radicand, non-integral power of a negative number).
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NotProjectivelyFlatError : public Error {
 public:
  NotProjectivelyFlatError(double residual, double tol)
      : Error("spray is not collinear with y: residual " + format_residual(residual) +
              " exceeds " + format_residual(tol)),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Supplied geometric data does not satisfy the constraints a constructor
// requires of it.
class ConstraintViolation : public Error {
 public:
  ConstraintViolation(const std::string& what, double residual)
      : Error(what + " (residual " + format_residual(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace projflat
