#pragma once

#include <stdexcept>
#include <string>

namespace yule {

/// Base for every error raised by the library. Catching `yule::Error` at the
/// CLI boundary maps to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Centered sum of squares of a sampled series vanished (constant path).
class DegenerateVariance : public Error {
 public:
  using Error::Error;
};

/// Horizon not past the threshold T*(theta) of the continuous-time bound.
class BelowThreshold : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Tail-bound scale beta below 4 * sqrt(variance).
class BetaTooSmall : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Euler recursion with theta * delta >= 2 (explosive).
class UnstableScheme : public DomainError {
 public:
  using DomainError::DomainError;
};

class EigenFailure : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

class ZeroBins : public Error {
 public:
  using Error::Error;
};

/// Input time column is not a uniform grid.
class NonuniformGrid : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (CSV syntax, missing columns).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Too many degenerate replications in a Monte Carlo run.
class TooManySkipped : public Error {
 public:
  using Error::Error;
};

}  // namespace yule
