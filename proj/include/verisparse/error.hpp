#pragma once

#include <stdexcept>
#include <string>

namespace verisparse {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Interval division by an interval that contains zero.
class DivisionByZero : public Error {
 public:
  using Error::Error;
};

// An unverified factorization (LU or LDL^T) met an exactly zero pivot.
class FactorizationBreakdown : public Error {
 public:
  using Error::Error;
};

// The nonzero pattern admits no perfect matching.
class StructurallySingular : public Error {
 public:
  using Error::Error;
};

}  // namespace verisparse
