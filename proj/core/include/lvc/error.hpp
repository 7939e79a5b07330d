#pragma once

#include <stdexcept>
#include <string>

namespace lvc {

// Coarse failure categories. The CLI maps each to a distinct exit code.
enum class ErrorKind {
  InvalidArgument,      // parameter / flag / domain constraint violated
  InvalidState,         // non-finite or out-of-domain state
  NoInteriorEquilibrium,
  DegenerateGap,        // equilibrium gap below eps_min (symmetric parameters)
  HorizonExceeded,      // convergence ball never reached before t_max
  ConvergenceReExit,    // trajectory left the convergence ball after entering it
  StepUnderflow,        // adaptive step collapsed (stiffness)
  InvarianceBreach,     // state left the unit square beyond the permitted slack
  OutOfRange,           // dense evaluation outside the trajectory span
  Consistency,          // trajectory/params mismatch
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by convergence_time when the trajectory never gets within delta of E*.
class HorizonExceededError : public Error {
 public:
  HorizonExceededError(const std::string& what, double closest_distance, double closest_time)
      : Error(ErrorKind::HorizonExceeded, what),
        closest_distance_(closest_distance),
        closest_time_(closest_time) {}

  [[nodiscard]] double closest_distance() const noexcept { return closest_distance_; }
  [[nodiscard]] double closest_time() const noexcept { return closest_time_; }

 private:
  double closest_distance_;
  double closest_time_;
};

class InvarianceBreachError : public Error {
 public:
  InvarianceBreachError(const std::string& what, double tau, double L, double S)
      : Error(ErrorKind::InvarianceBreach, what), tau_(tau), L_(L), S_(S) {}

  [[nodiscard]] double tau() const noexcept { return tau_; }
  [[nodiscard]] double L() const noexcept { return L_; }
  [[nodiscard]] double S() const noexcept { return S_; }

 private:
  double tau_;
  double L_;
  double S_;
};

}  // namespace lvc
