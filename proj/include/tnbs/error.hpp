#pragma once

#include <stdexcept>
#include <string>

namespace tnbs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible extents, lengths or index positions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid hyperparameters or structural configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad user data: malformed files, non-finite samples, short signals.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown (non-finite intermediate results).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tnbs
