#pragma once

#include <stdexcept>
#include <string>

namespace optolg {

/// Operand shapes or tensor-factor dims do not agree.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A density matrix failed its trace/Hermiticity/positivity checks.
class StateInvariantError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The displacement fixed point did not settle on the branch connected to
/// the undriven solution. `critical_drive` is the estimated Ω at the fold
/// (infinite when the modulus equation has no fold).
class CriticalDrivingError : public std::runtime_error {
public:
  CriticalDrivingError(const std::string &what, double critical_drive)
      : std::runtime_error(what), critical_drive_(critical_drive) {}
  double critical_drive() const noexcept { return critical_drive_; }

private:
  double critical_drive_;
};

/// Adaptive integration could not meet the requested tolerance.
class IntegratorError : public std::runtime_error {
public:
  IntegratorError(const std::string &what, double time_reached)
      : std::runtime_error(what), time_reached_(time_reached) {}
  double time_reached() const noexcept { return time_reached_; }

private:
  double time_reached_;
};

/// The stationary problem is singular or has more than one solution.
class SteadyStateError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace optolg
