#pragma once

#include <stdexcept>
#include <string>

namespace awing {

/// Base for every error raised by the library. Callers that only need to
/// report and exit can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two grids that must agree in channels or frame do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain where the operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class OutOfFrameError : public Error {
 public:
  using Error::Error;
};

/// The normalization distance for a metric evaluated to zero.
class DegenerateNormalizationError : public Error {
 public:
  using Error::Error;
};

/// A summary metric was requested over an empty population.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch, std::size_t step)
      : Error(what), epoch_(epoch), step_(step) {}

  std::size_t epoch() const noexcept { return epoch_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t epoch_;
  std::size_t step_;
};

/// Malformed input file or command-line value.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace awing
