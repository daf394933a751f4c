#pragma once

#include <stdexcept>
#include <string>

namespace danzer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An enumeration would emit more points than the configured budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Exact integer arithmetic would not fit the available width.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// The requested exhaustive computation is outside the feasible range.
class Infeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace danzer
