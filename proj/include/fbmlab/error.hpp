#pragma once

#include <stdexcept>
#include <string>

namespace fbmlab {

/// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, configuration, or violated constant constraints.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (r <= 1, zeta+xi <= 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Time or index outside a sampled window, or not aligned with the grid.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A state violating an operation's precondition (e.g. non-solenoidal velocity).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: indefinite embeddings, Newton failure, blow-up, overflow.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fbmlab
