#pragma once

#include <stdexcept>
#include <string>

namespace rfrboost {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed caller input: bad dimensions, non-finite values, out-of-range labels.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Normal equations (or another linear system) are singular at lambda = 0.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

// Sandwich problem has no unique minimizer (e.g. ZW = 0 with lambda = 0).
class DegenerateProblem : public Error {
 public:
  using Error::Error;
};

// Functional gradient vanished; the boosting loop treats this as convergence.
class ZeroGradient : public Error {
 public:
  using Error::Error;
};

// Every candidate pair for SWIM sampling has coincident inputs.
class DegeneratePairs : public Error {
 public:
  using Error::Error;
};

// CSV ingestion failure; message carries row/column location.
class IngestError : public Error {
 public:
  using Error::Error;
};

// Run configuration is invalid (unknown key, missing field, bad combination).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rfrboost
