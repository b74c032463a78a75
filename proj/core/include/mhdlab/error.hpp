#pragma once

#include <stdexcept>
#include <string>

namespace mhdlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or violated preconditions.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Loss of hyperbolicity (rho or rho_p non-positive, |p| out of range,
/// A0 not positive definite). Carries the simulation time when known.
class HyperbolicityError : public Error {
 public:
  explicit HyperbolicityError(const std::string& what, double time = -1.0) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// NaN detected or a Poisson solve missed its tolerance.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what, double time = -1.0) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Malformed checkpoint, CSV or metadata.
class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mhdlab
