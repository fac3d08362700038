#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zscreen {

// Base for every error raised by the library. The CLI maps InputError to
// exit code 2 and StatisticalError (and its subclasses) to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input (missing columns, bad files).
class InputError : public Error {
 public:
  using Error::Error;
};

class StatisticalError : public Error {
 public:
  using Error::Error;
};

// A value outside the domain of a transformation.
class DomainError : public StatisticalError {
 public:
  DomainError(std::string transformation, double value, std::size_t index = 0);

  const std::string& transformation() const noexcept { return transformation_; }
  double value() const noexcept { return value_; }
  // 1-based position in the sequence, 0 when not applicable.
  std::size_t index() const noexcept { return index_; }

 private:
  std::string transformation_;
  double value_;
  std::size_t index_;
};

// Zero-variance sample where a statistic needs a nonzero one.
class DegenerateError : public StatisticalError {
 public:
  using StatisticalError::StatisticalError;
};

class SingularError : public StatisticalError {
 public:
  SingularError(const std::string& what, std::size_t index)
      : StatisticalError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// The data cannot support the requested statistic or model.
class IneligibleError : public StatisticalError {
 public:
  using StatisticalError::StatisticalError;
};

}  // namespace zscreen
