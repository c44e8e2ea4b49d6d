#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nch {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two operands live on different grids, or a buffer has the wrong length.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid scalar parameter (negative width, odd node count, alpha <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A grid function would contain NaN or Inf.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of an operator, e.g. a nonzero-mean field
/// passed to the inverse Laplacian.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, double measured = 0.0)
      : Error(what), measured_(measured) {}
  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

/// Inverse transform produced an imaginary part above round-off.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Kernel violates nonnegativity, evenness, or normalization, or the
/// implicit operator lost positivity.
class KernelError : public Error {
 public:
  using Error::Error;
};

/// gamma0 = eps^2 (J*1) - 1 is not positive.
class DiffusivityError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// A time integration produced NaN/Inf.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, std::int64_t step)
      : Error(what), step_(step) {}
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

/// Two fields that should share their mean do not.
class ConservationError : public Error {
 public:
  using Error::Error;
};

/// A refinement study could not be completed.
class StudyError : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or has a malformed header/body.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace nch
