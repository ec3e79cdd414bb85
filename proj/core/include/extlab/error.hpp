#pragma once

#include <stdexcept>
#include <string>

namespace extlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time or point outside the declared validity of a background.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Consecutive vertices (or geodesic anchors) closer than the resolution floor.
class DegenerateCurve : public Error {
 public:
  using Error::Error;
};

class CflViolation : public Error {
 public:
  using Error::Error;
};

class CurvatureCeiling : public Error {
 public:
  using Error::Error;
};

/// A property that must hold by construction failed; indicates a bug.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace extlab
