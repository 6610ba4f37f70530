#pragma once

#include <stdexcept>
#include <string>

namespace riskphase {

/// Matrix failed the positive-definiteness test (singular or indefinite input).
class NotPositiveDefiniteError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch between arguments.
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition documented on the call was violated by the caller.
class ContractViolationError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Requested quantity diverges at or beyond a critical parameter value.
/// Distinct from std::domain_error so callers can annotate rather than abort.
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Iterative procedure exhausted its budget without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Likelihood surface has no interior maximum (e.g. all points saturated).
class UnidentifiableFitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Two fitted curves are (numerically) parallel and do not intersect.
class NoIntersectionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A ratio was requested against a denominator that is zero or negative.
class DegenerateDenominatorError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace riskphase
