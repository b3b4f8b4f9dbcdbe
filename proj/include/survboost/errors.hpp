#pragma once

#include <stdexcept>
#include <string>

namespace survboost {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad flags or configuration (CLI exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Unreadable input or a dataset that violates its invariants (exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Degenerate numerics: unbounded IPW weights, non-finite gradients,
/// replicate generation that keeps failing (exit code 3).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace survboost
