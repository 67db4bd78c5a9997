#pragma once

#include <stdexcept>
#include <string>

namespace mialab {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A matrix that should be SPD failed to factorize (non-PD input, singular
// empirical covariance, ...).
class FactorizationError : public Error {
public:
  explicit FactorizationError(const std::string& msg) : Error(msg) {}
};

// Shape or parameter-range violation (dimension mismatch, too few samples,
// m out of range, ...).
class InvalidArgument : public Error {
public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Constraint set is infeasible (e.g. projection constraints not orthogonal).
class InconsistentConstraints : public Error {
public:
  explicit InconsistentConstraints(const std::string& msg) : Error(msg) {}
};

// Config-file parse failure; message names the offending line.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace mialab
