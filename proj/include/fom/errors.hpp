#pragma once

#include <stdexcept>
#include <string>

namespace fom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the domain of h, f or Psi, or a value is not finite.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The Bregman proximal subproblem is unbounded below for the given step.
class NotAdmissible : public Error {
 public:
  using Error::Error;
};

/// No closed-form solver is registered for the (h, Psi) pair.
class UnsupportedPair : public Error {
 public:
  using Error::Error;
};

class ConjugateUnavailable : public Error {
 public:
  using Error::Error;
};

/// The step-size condition failed down to the smallest allowed step.
class BacktrackFailed : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration, unknown instance name, or incompatible method.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fom
