#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace alps {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, malformed input file or violated precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical failure that prevents a computation from continuing.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Raised when a Hessian handed to the registry is not negative definite.
class IndefiniteHessian : public NumericalError {
 public:
  IndefiniteHessian(std::size_t pivot, const std::string& what)
      : NumericalError(what), pivot_(pivot) {}

  /// Index of the diagonal entry where the Cholesky factorisation broke down.
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// The sampler needs at least one registered mode and has none.
class NoModesError : public NumericalError {
 public:
  NoModesError() : NumericalError("no modes discovered") {}
};

}  // namespace alps
