#pragma once

#include <stdexcept>
#include <string>

namespace afe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor extents disagree with what an operation requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent user input (files, manifests, configs).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A metric is mathematically undefined for the given inputs.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// Training diverged or otherwise could not continue.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace afe
