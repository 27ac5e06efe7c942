#ifndef PENSIM_ERRORS_HPP
#define PENSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pensim {

// Base class for all recoverable errors raised by the library. The CLI maps
// InputError subclasses to exit code 2, NumericFailure to 3, and anything
// else (logic_error, internal invariant breaches) to 4.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent user input (files, flags, configs).
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

class MissingCell : public InputError {
 public:
  using InputError::InputError;
};

class DuplicateCell : public InputError {
 public:
  using InputError::InputError;
};

class RangeError : public InputError {
 public:
  using InputError::InputError;
};

class EmptyEnsemble : public InputError {
 public:
  using InputError::InputError;
};

class EmptyTable : public InputError {
 public:
  using InputError::InputError;
};

class SurfaceTooShort : public InputError {
 public:
  using InputError::InputError;
};

class SurfaceGap : public InputError {
 public:
  using InputError::InputError;
};

class HorizonInPast : public InputError {
 public:
  using InputError::InputError;
};

class InsufficientHorizon : public InputError {
 public:
  using InputError::InputError;
};

class SchemeUndefined : public InputError {
 public:
  using InputError::InputError;
};

class MissingArtifact : public InputError {
 public:
  using InputError::InputError;
};

class CheckpointMismatch : public InputError {
 public:
  using InputError::InputError;
};

class InvalidSpec : public InputError {
 public:
  using InputError::InputError;
};

class ShapeMismatch : public InputError {
 public:
  using InputError::InputError;
};

class EmptyBatch : public InputError {
 public:
  using InputError::InputError;
};

class EmptyDataset : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateMatrix : public InputError {
 public:
  using InputError::InputError;
};

class DegenerateCurve : public InputError {
 public:
  using InputError::InputError;
};

// Numerical breakdown during training or simulation (NaN/Inf, divergence).
class NumericFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace pensim

#endif  // PENSIM_ERRORS_HPP
