#pragma once

#include <stdexcept>
#include <string>

namespace bicon {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed expression construction (overflowing rationals, 0^-1, ...).
class ExprError : public Error {
public:
  using Error::Error;
};

/// Numeric evaluation hit a domain violation (log of a non-positive value,
/// division by zero, unbound symbol, non-finite intermediate).
class EvaluationError : public Error {
public:
  using Error::Error;
};

/// Input-format diagnostics carry a 1-based line/column position.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line, int column)
      : Error(msg + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line(line), column(column) {}
  int line;
  int column;
};

class UndeclaredSymbol : public ParseError {
public:
  using ParseError::ParseError;
};

class MissingComponent : public Error {
public:
  using Error::Error;
};

class SingularMetric : public Error {
public:
  using Error::Error;
};

class SlotVarianceMismatch : public Error {
public:
  using Error::Error;
};

/// A projector-pair invariant failed; the message names the invariant.
class ValidationFailure : public Error {
public:
  using Error::Error;
};

/// The trace of a candidate projector does not sample close to an integer.
class NonIntegerTrace : public Error {
public:
  using Error::Error;
};

/// The chosen coordinate block spans a degenerate (null) distribution.
class NullDistribution : public Error {
public:
  using Error::Error;
};

/// Requested an object that is undefined at this projector rank.
class DegenerateRank : public Error {
public:
  using Error::Error;
};

class InvalidRank : public Error {
public:
  using Error::Error;
};

class StepOutsideBox : public Error {
public:
  using Error::Error;
};

/// Constraint residuals exceeded the configured bound during transport;
/// signals inconsistent initial data rather than an integrator failure.
class ResidualBlowup : public Error {
public:
  using Error::Error;
};

} // namespace bicon
