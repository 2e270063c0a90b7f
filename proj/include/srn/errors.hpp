#pragma once

#include <stdexcept>
#include <string>

namespace srn {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series or iteration did not reach its tolerance within the allowed budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f(lo) and f(hi) do not bracket a sign change.
class BracketError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two directions are (anti)parallel where a formula divides by sin(theta).
class DegenerateAngleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A weight vector with (numerically) zero norm where a direction is needed.
class ZeroVectorError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Integration or descent left the finite, bounded regime.
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No evaluation path exists for the requested quantity.
class UnavailableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace srn
