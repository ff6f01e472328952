#pragma once

#include <stdexcept>
#include <string>

namespace thzqkd {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument violates a documented precondition (out-of-range parameter,
// bad index, frequency outside the absorption table).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Configuration text could not be parsed or fails validation. The message is
// prefixed with the offending field path and, when known, the line number.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A computation could not produce a trustworthy result: an unphysical
// covariance matrix, a failed bracket, a non-monotone rate curve.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class BracketError : public NumericalError {
 public:
  BracketError(const std::string& what, double rate_lo, double rate_hi)
      : NumericalError(what), rate_lo_(rate_lo), rate_hi_(rate_hi) {}

  double rate_lo() const noexcept { return rate_lo_; }
  double rate_hi() const noexcept { return rate_hi_; }

 private:
  double rate_lo_;
  double rate_hi_;
};

}  // namespace thzqkd
