#pragma once

#include <stdexcept>
#include <string>

namespace wwdn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Unreadable, unwritable or malformed files.
class IoError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A weighted norm was requested for a term with decay rate mu <= a.
class MuTooSmall : public Error {
 public:
  using Error::Error;
};

/// The integral defining T_lambda does not converge (lambda = 0 and mu = 0).
class DivergentIntegral : public Error {
 public:
  using Error::Error;
};

class NonzeroConstantSource : public Error {
 public:
  using Error::Error;
};

/// A profile grew beyond the configured term cap.
class TermCapExceeded : public Error {
 public:
  using Error::Error;
};

/// sup |(|D| eta)| >= guard: the flattening map is not a diffeomorphism.
class GuardViolation : public Error {
 public:
  using Error::Error;
};

class SeriesDivergence : public Error {
 public:
  using Error::Error;
};

class NoContraction : public Error {
 public:
  using Error::Error;
};

class NotInRange : public Error {
 public:
  using Error::Error;
};

class NewtonDivergence : public Error {
 public:
  using Error::Error;
};

class SymmetryViolation : public Error {
 public:
  using Error::Error;
};

class TooFewModes : public Error {
 public:
  using Error::Error;
};

}  // namespace wwdn
