#pragma once

#include <stdexcept>
#include <string>

namespace pathtsp {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad files, bad arguments, non-metric data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A graph does not have the shape an algorithm requires
/// (wrong parities, disconnected, missing vertices).
class StructureError : public Error {
 public:
  using Error::Error;
};

/// A documented size or iteration limit was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A precondition of an analysis step does not hold for the given input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Something that the theory guarantees did not happen. Always a bug signal.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace pathtsp
