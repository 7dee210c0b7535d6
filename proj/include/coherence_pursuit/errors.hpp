#pragma once

#include <stdexcept>
#include <string>

namespace cop {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the caller's input was violated (bad shape, bad
/// parameter, non-finite entry). Maps to the CLI usage exit code.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The input was well formed but the computation could not reach its
/// postcondition, e.g. the sampled columns never span r dimensions.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cop
