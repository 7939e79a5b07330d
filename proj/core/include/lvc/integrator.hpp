#pragma once

// Adaptive Dormand-Prince 5(4) integration of the Lotka-Volterra field with
// a quintic Hermite continuous extension, unit-square invariance monitoring and
// event location on the dense output.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lvc/model.hpp"

namespace lvc {

struct SolverConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  double t_max = 200.0;
  std::optional<double> initial_step;  // automatic when absent
  std::optional<double> max_step;      // t_max / 10 when absent
  double invariance_slack = kDefaultDomainSlack;
  std::size_t max_steps = 10'000'000;

  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

void validate(const SolverConfig& cfg);

struct SolverStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t field_evaluations = 0;
};

// Densely evaluable solution. Immutable once built.
class Trajectory {
 public:
  // Constant solution x(tau) = x on [t0, t1]; used for synthetic runs.
  static Trajectory constant(const Params& p, const State& x, double t0, double t1);

  [[nodiscard]] const Params& params() const noexcept { return params_; }
  [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
  [[nodiscard]] std::span<const State> states() const noexcept { return states_; }
  [[nodiscard]] const SolverStats& stats() const noexcept { return stats_; }
  [[nodiscard]] double t_begin() const noexcept { return times_.front(); }
  [[nodiscard]] double t_end() const noexcept { return times_.back(); }
  [[nodiscard]] const State& final_state() const noexcept { return states_.back(); }

  // Throws OutOfRange outside [t_begin, t_end].
  [[nodiscard]] State at(double tau) const;

 private:
  friend class TrajectoryBuilder;

  // Quintic Hermite interpolant of one step started at t0 with nominal size
  // h. Rows: y0, y1, h y0', h y1', h^2 y0'', h^2 y1''. The second derivative
  // comes from the analytic Jacobian, so no extra field evaluations are spent.
  struct Segment {
    double t0 = 0.0;
    double h = 0.0;
    std::array<std::array<double, 2>, 6> c{};
  };

  Trajectory() = default;
  [[nodiscard]] State eval_segment(std::size_t i, double tau) const noexcept;

  Params params_;
  std::vector<double> times_;
  std::vector<State> states_;
  std::vector<Segment> segments_;  // segments_[i] spans [times_[i], times_[i+1]]
  SolverStats stats_;
};

State dense_eval(const Trajectory& traj, double tau);

enum class EventDirection { Rising, Falling, Both };

struct EventSpec {
  std::function<double(double, const State&)> g;
  EventDirection direction = EventDirection::Both;
  bool terminal = false;
};

struct EventRecord {
  std::size_t event_index = 0;
  double tau = 0.0;
  State state;
  bool rising = false;
};

inline constexpr double kEventTimeTolerance = 1e-10;

struct IntegrationResult {
  Trajectory trajectory;
  std::vector<EventRecord> events;
  bool terminated_by_event = false;
};

// Integrates from x0 at tau = 0 up to cfg.t_max (or a terminal event).
// Step acceptance uses max_i |err_i| / (abs_tol + rel_tol * max(|y_i|, |y_new_i|)) <= 1.
// Throws StepUnderflow when h drops below 1e-14 * t_max and
// InvarianceBreachError when an accepted state leaves the slack-widened square.
IntegrationResult integrate(const Params& p, const State& x0, const SolverConfig& cfg,
                            std::span<const EventSpec> events = {});

// Same, starting at tau = t0 and stopping at t1.
IntegrationResult integrate_span(const Params& p, const State& x0, double t0, double t1,
                                 const SolverConfig& cfg, std::span<const EventSpec> events = {});

// Max-norm distance to the interior equilibrium.
double distance_to_equilibrium(const State& x, const State& eq) noexcept;

struct ConvergenceResult {
  double t_conv = 0.0;
  double verified_until = 0.0;  // end of the re-exit guard window
};

// First tau with max(|L - L*|, |S - S*|) <= delta, located by a terminal
// event. Integration then continues to min(t_max, 11 * t_conv); leaving the
// ball again raises ConvergenceReExit. Never entering raises
// HorizonExceededError carrying the closest approach.
ConvergenceResult convergence_time(const Params& p, const State& x0, double delta,
                                   const SolverConfig& cfg);

}  // namespace lvc
