#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mrjsim {

// Base for every domain error thrown by the library. Precondition
// violations on plain arguments use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnumerationTooLarge : public Error {
 public:
  explicit EnumerationTooLarge(std::size_t cap)
      : Error("candidate enumeration exceeds the cap of " + std::to_string(cap) + " options"),
        cap_(cap) {}
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
};

// A beta construction produced a negative intermediate mass.
class ConstructionInfeasible : public Error {
 public:
  using Error::Error;
};

// A beta construction needs more than unit probability mass. `required_k`
// carries the discretization the K-selection formula recommends, or 0 when
// no formula applies.
class MassOverflow : public Error {
 public:
  MassOverflow(double mass, int required_k)
      : Error(message(mass, required_k)), mass_(mass), required_k_(required_k) {}
  double mass() const noexcept { return mass_; }
  int required_k() const noexcept { return required_k_; }

 private:
  static std::string message(double mass, int required_k) {
    std::string msg = "service-option mass " + std::to_string(mass) + " exceeds 1";
    if (required_k > 0) msg += "; use K >= " + std::to_string(required_k);
    return msg;
  }
  double mass_;
  int required_k_;
};

// The arrival rate is at or beyond the region where any policy is stable.
class NoStableK : public Error {
 public:
  using Error::Error;
};

// The requested candidate set cannot dominate the arrival rates at this K.
class NotStabilizable : public Error {
 public:
  using Error::Error;
};

class TraceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrjsim
