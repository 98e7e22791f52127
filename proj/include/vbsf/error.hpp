#pragma once

#include <stdexcept>
#include <string>

namespace vbsf {

/// Bad argument, violated precondition, or malformed configuration.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Missing, unreadable, or corrupt on-disk data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric computation produced a value it cannot continue with.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vbsf
