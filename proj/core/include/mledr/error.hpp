#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mledr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A constrained solve has no admissible solution (e.g. a negative partner constant).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Quadrature, root finding or sampling failed to reach the requested accuracy.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, double achievedError = 0.0)
      : Error(what), achieved_error_(achievedError) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// A density vanished at an observation where the contrast needs its logarithm.
class DensityZeroError : public Error {
 public:
  DensityZeroError(const std::string& what, std::size_t index) : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// A configuration record is malformed; the message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mledr
