#pragma once

#include <stdexcept>
#include <string>

namespace blobtrack {

// Root of every error thrown by the library. Callers that only care about
// "something went wrong in blobtrack" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed mesh topology (bad indices, empty meshes, empty restrictions).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Caller passed a value outside an operation's domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Division by zero, non-positive mass and similar degenerate arithmetic.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Not enough samples, or degenerate samples, for a statistic.
class StatisticsError : public Error {
 public:
  using Error::Error;
};

// Unreadable or inconsistent input files.
class InputError : public Error {
 public:
  using Error::Error;
};

// Violated call-order or data-consistency contract (e.g. out-of-order frames).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace blobtrack
