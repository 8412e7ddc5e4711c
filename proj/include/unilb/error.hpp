#pragma once

#include <stdexcept>
#include <string>

namespace unilb {

// Base for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input or parameters outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An operation's stated precondition does not hold for this input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A resource cap (oracle budget, iteration budget, rejection budget) was hit.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace unilb
