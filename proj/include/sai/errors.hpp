#pragma once

#include <stdexcept>
#include <string>

namespace sai {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (Matrix Market header, entry line, bounds).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Matrix Market field or format the reader does not handle.
class UnsupportedFieldError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// No perfect row/column matching exists for the pattern.
class StructuralSingularityError : public Error {
 public:
  using Error::Error;
};

/// A least-squares subproblem has no nonzero row to work with.
class DegeneratePatternError : public Error {
 public:
  using Error::Error;
};

/// The dense least-squares workspace would exceed the configured memory guard.
class WorkspaceGuardError : public Error {
 public:
  using Error::Error;
};

/// The s-by-s capacitance matrix I + V^T W is (numerically) singular.
class SingularUpdateError : public Error {
 public:
  SingularUpdateError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

}  // namespace sai
