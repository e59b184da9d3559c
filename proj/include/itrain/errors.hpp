#pragma once

#include <stdexcept>
#include <string>

namespace itrain {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A precondition on an argument was violated (range, shape, norm, ...).
class InvalidParameter : public Error {
 public:
  explicit InvalidParameter(const std::string& what) : Error(what) {}
};

// An approximate spectrum hit one of its known degeneracy conditions.
class DegenerateSpectrum : public Error {
 public:
  explicit DegenerateSpectrum(const std::string& what) : Error(what) {}
};

// Conditioning on a trained set failed even after ridge regularization.
class SingularConditioning : public Error {
 public:
  explicit SingularConditioning(const std::string& what) : Error(what) {}
};

// Conditional variance is zero: the quantity is deterministic given the
// trained set, so distribution queries are ill-posed.
class DeterministicChannel : public Error {
 public:
  explicit DeterministicChannel(const std::string& what) : Error(what) {}
};

// Beamformer requested for an all-zero trained channel segment.
class UndefinedBeamformer : public Error {
 public:
  explicit UndefinedBeamformer(const std::string& what) : Error(what) {}
};

// Regressor training diverged (non-finite loss).
class TrainingFailure : public Error {
 public:
  explicit TrainingFailure(const std::string& what) : Error(what) {}
};

// Config file problem; message carries the 1-based line number.
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ConfigError(const std::string& what) : Error(what), line_(0) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace itrain
