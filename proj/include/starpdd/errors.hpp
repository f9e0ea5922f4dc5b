#pragma once

#include <stdexcept>

namespace starpdd {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: size mismatches, non-finite values, broken invariants.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// Root bracket does not satisfy f(lo) >= 0 >= f(hi).
class InvalidBracketError : public Error {
 public:
  using Error::Error;
};

/// A factorization or solve failed, or lost too much accuracy.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed (e.g. a block update increased the
/// objective it is supposed to minimize).
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Config file could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace starpdd
