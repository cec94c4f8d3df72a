#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hwave {

// Error categories map one-to-one onto the C API status codes and the CLI
// exit codes (config = 2, numeric = 3, certificate = 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A record failed its own invariants before any computation started.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Quadrature breakdown, non-finite values, unstable time stepping.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Fixed-point iteration ran out of iterations. Carries the difference-norm
// history so callers can inspect how far it got.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : NumericError(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

// An iterate left the ball |u| <= 1/A on which the envelope bound is valid.
class DomainEscapeError : public NumericError {
 public:
  DomainEscapeError(const std::string& what, std::vector<double> history)
      : NumericError(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

// Leapfrog produced NaN/Inf; records the first offending grid point.
class InstabilityError : public NumericError {
 public:
  InstabilityError(const std::string& what, double t, double r)
      : NumericError(what), t_(t), r_(r) {}
  double t() const noexcept { return t_; }
  double r() const noexcept { return r_; }

 private:
  double t_;
  double r_;
};

}  // namespace hwave
