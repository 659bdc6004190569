#pragma once

#include <stdexcept>
#include <string>

namespace gbd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidPairError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class DegenerateGraphError : public Error {
 public:
  using Error::Error;
};

class EmptyGraphError : public Error {
 public:
  using Error::Error;
};

class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

/// PA synthesis: t^2 - 2t(t-1)rho < 0.
class DensityTooLargeError : public InvalidParameterError {
 public:
  using InvalidParameterError::InvalidParameterError;
};

class SynthesisFailureError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergedError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Wraps an error raised inside one pipeline stage of an experiment.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace gbd
