#include "lvc/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lvc/error.hpp"
#include "lvc/root_finding.hpp"

namespace lvc {

namespace {

using Vec2 = std::array<double, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
// The explicit pair is stable for |h lambda| up to about 3.3 on the negative
// real axis. Near E* the error estimate alone lets h grow far past that and
// the controller then rides a roundoff-driven sawtooth at tolerance level.
constexpr double kStabilityBound = 3.0;

class Field {
 public:
  Field(const Params& p, SolverStats& stats) : p_(p), stats_(stats) {}

  Vec2 operator()(const Vec2& y) const {
    ++stats_.field_evaluations;
    const Velocity v = vector_field_unchecked(p_, y[0], y[1]);
    return {v.dL, v.dS};
  }

 private:
  const Params& p_;
  SolverStats& stats_;
};

// y'' = J(y) f(y), exact for this field.
Vec2 second_derivative(const Params& p, const Vec2& y, const Vec2& f) noexcept {
  const double L = y[0], S = y[1];
  return {(1.0 - 2.0 * L - p.a12 * S) * f[0] - p.a12 * L * f[1],
          p.rho * (-p.a21 * S * f[0] + (1.0 - 2.0 * S - p.a21 * L) * f[1])};
}

// Largest step the method stays stable for, from the local Jacobian.
double stability_cap(const Params& p, const Vec2& y) {
  const EigenPair ev = eigenvalues(jacobian(p, State{y[0], y[1]}));
  const double radius = std::max(std::abs(ev.first), std::abs(ev.second));
  return radius > 0.0 ? kStabilityBound / radius : std::numeric_limits<double>::infinity();
}

double scaled_norm(const Vec2& v, const Vec2& y, const SolverConfig& cfg) {
  double n = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
    n = std::max(n, std::abs(v[i]) / sc);
  }
  return n;
}

// Automatic initial step from the field magnitude at x0 (Hairer's hinit).
double initial_step(const Field& f, const Vec2& y0, const Vec2& f0, double span, double h_max,
                    const SolverConfig& cfg) {
  const double d0 = scaled_norm(y0, y0, cfg);
  const double d1n = scaled_norm(f0, y0, cfg);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, h_max);
  const Vec2 y1{y0[0] + h0 * f0[0], y0[1] + h0 * f0[1]};
  const Vec2 f1 = f(y1);
  const Vec2 df{f1[0] - f0[0], f1[1] - f0[1]};
  const double d2 = scaled_norm(df, y0, cfg) / h0;
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, h_max, span});
}

bool qualifies(double ga, double gb, EventDirection dir, bool& rising) {
  const bool up = ga < 0.0 && gb >= 0.0;
  const bool down = ga > 0.0 && gb <= 0.0;
  if (up && dir != EventDirection::Falling) {
    rising = true;
    return true;
  }
  if (down && dir != EventDirection::Rising) {
    rising = false;
    return true;
  }
  return false;
}

}  // namespace

void validate(const SolverConfig& cfg) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidArgument, m); };
  if (!(cfg.rel_tol > 0.0) || !std::isfinite(cfg.rel_tol)) fail("rel_tol must be > 0");
  if (!(cfg.abs_tol > 0.0) || !std::isfinite(cfg.abs_tol)) fail("abs_tol must be > 0");
  if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) fail("t_max must be > 0");
  if (!(cfg.invariance_slack >= 0.0)) fail("invariance_slack must be >= 0");
  if (cfg.initial_step && !(*cfg.initial_step > 0.0)) fail("initial_step must be > 0");
  if (cfg.max_step && !(*cfg.max_step > 0.0)) fail("max_step must be > 0");
  if (cfg.max_steps == 0) fail("max_steps must be positive");
}

// Assembles a Trajectory step by step; only integrate_span uses it.
class TrajectoryBuilder {
 public:
  TrajectoryBuilder(const Params& p, double t0, const State& x0) {
    traj_.params_ = p;
    traj_.times_.push_back(t0);
    traj_.states_.push_back(x0);
  }

  Trajectory::Segment& stage_segment() { return staged_; }

  [[nodiscard]] State eval_staged(double tau) const noexcept {
    const double theta = (tau - staged_.t0) / staged_.h;
    return eval(staged_, theta);
  }

  void commit(double t_end, const State& x_end) {
    traj_.segments_.push_back(staged_);
    traj_.times_.push_back(t_end);
    traj_.states_.push_back(x_end);
  }

  SolverStats& stats() { return traj_.stats_; }

  Trajectory finish() && { return std::move(traj_); }

  // Quintic Hermite basis on [0, 1].
  static State eval(const Trajectory::Segment& s, double t) noexcept {
    const double t2 = t * t, t3 = t2 * t;
    const double u = 1.0 - t, u2 = u * u, u3 = u2 * u;
    const double b1 = t3 * (1.0 + 3.0 * u + 6.0 * u2);
    const double b2 = t * u3 * (1.0 + 3.0 * t);
    const double b3 = -u * t3 * (1.0 + 3.0 * u);
    const double b4 = 0.5 * t2 * u3;
    const double b5 = 0.5 * u2 * t3;
    State out;
    double* dst[2] = {&out.L, &out.S};
    for (int i = 0; i < 2; ++i) {
      // b0 + b1 == 1: written as an increment so constant segments stay exact.
      *dst[i] = s.c[0][i] + b1 * (s.c[1][i] - s.c[0][i]) + b2 * s.c[2][i] + b3 * s.c[3][i] +
                b4 * s.c[4][i] + b5 * s.c[5][i];
    }
    return out;
  }

 private:
  Trajectory traj_;
  Trajectory::Segment staged_;
};

Trajectory Trajectory::constant(const Params& p, const State& x, double t0, double t1) {
  validate(p);
  if (!(t1 > t0)) {
    throw Error(ErrorKind::InvalidArgument, "constant trajectory requires t1 > t0");
  }
  Trajectory t;
  t.params_ = p;
  t.times_ = {t0, t1};
  t.states_ = {x, x};
  Segment seg;
  seg.t0 = t0;
  seg.h = t1 - t0;
  seg.c[0] = {x.L, x.S};
  seg.c[1] = {x.L, x.S};
  t.segments_.push_back(seg);
  return t;
}

State Trajectory::eval_segment(std::size_t i, double tau) const noexcept {
  const Segment& s = segments_[i];
  return TrajectoryBuilder::eval(s, (tau - s.t0) / s.h);
}

State Trajectory::at(double tau) const {
  if (!(tau >= times_.front() && tau <= times_.back())) {
    std::ostringstream os;
    os.precision(17);
    os << "tau=" << tau << " outside trajectory span [" << times_.front() << ", " << times_.back()
       << "]";
    throw Error(ErrorKind::OutOfRange, os.str());
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), tau);
  const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
  if (times_[k] == tau) {
    return states_[k];
  }
  return eval_segment(k, tau);
}

State dense_eval(const Trajectory& traj, double tau) { return traj.at(tau); }

IntegrationResult integrate(const Params& p, const State& x0, const SolverConfig& cfg,
                            std::span<const EventSpec> events) {
  return integrate_span(p, x0, 0.0, cfg.t_max, cfg, events);
}

IntegrationResult integrate_span(const Params& p, const State& x0, double t0, double t1,
                                 const SolverConfig& cfg, std::span<const EventSpec> events) {
  validate(p);
  validate(cfg);
  if (!x0.finite() || !x0.in_domain(0.0)) {
    std::ostringstream os;
    os << "initial state (" << x0.L << ", " << x0.S << ") must lie in [0, 1]^2";
    throw Error(ErrorKind::InvalidState, os.str());
  }
  if (!(t1 > t0)) {
    throw Error(ErrorKind::InvalidArgument, "integration span must satisfy t1 > t0");
  }

  const double span = t1 - t0;
  const double h_max = std::min(cfg.max_step.value_or(0.1 * span), span);
  const double h_min = 1e-14 * std::max(std::abs(t1), span);

  TrajectoryBuilder builder(p, t0, x0);
  SolverStats& stats = builder.stats();
  const Field f(p, stats);

  Vec2 y{x0.L, x0.S};
  Vec2 k1 = f(y);
  double t = t0;
  double h = cfg.initial_step ? std::min(*cfg.initial_step, h_max)
                              : std::min(initial_step(f, y, k1, span, h_max, cfg),
                                         stability_cap(p, y));

  std::vector<double> g_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) {
    g_prev[e] = events[e].g(t0, x0);
  }

  std::vector<EventRecord> recorded;
  bool terminated = false;
  bool rejected_last = false;

  while (t < t1) {
    if (stats.accepted_steps + stats.rejected_steps >= cfg.max_steps) {
      throw Error(ErrorKind::StepUnderflow, "maximum number of steps exceeded");
    }
    bool last = false;
    if (t + h >= t1 || t1 - (t + h) < h_min) {
      h = t1 - t;
      last = true;
    }
    if (h < h_min) {
      std::ostringstream os;
      os << "step size " << h << " below minimum " << h_min << " at tau=" << t
         << " (problem appears stiff)";
      throw Error(ErrorKind::StepUnderflow, os.str());
    }

    auto stage = [&](std::initializer_list<std::pair<double, const Vec2*>> terms) {
      Vec2 s = y;
      for (const auto& [coef, k] : terms) {
        s[0] += h * coef * (*k)[0];
        s[1] += h * coef * (*k)[1];
      }
      return s;
    };
    const Vec2 k2 = f(stage({{a21, &k1}}));
    const Vec2 k3 = f(stage({{a31, &k1}, {a32, &k2}}));
    const Vec2 k4 = f(stage({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec2 k5 = f(stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec2 k6 = f(stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Vec2 y_new = stage({{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const Vec2 k7 = f(y_new);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double ei =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(ei) / sc);
    }
    if (!std::isfinite(err)) {
      err = std::numeric_limits<double>::infinity();
    }

    if (err > 1.0) {
      ++stats.rejected_steps;
      const double fac = std::max(kFacMin, kSafety * std::pow(err, -0.2));
      h *= std::min(1.0, fac);
      rejected_last = true;
      continue;
    }

    ++stats.accepted_steps;
    const double t_new = last ? t1 : t + h;
    const State x_new{y_new[0], y_new[1]};
    if (!x_new.in_domain(cfg.invariance_slack)) {
      std::ostringstream os;
      os.precision(17);
      os << "state (" << x_new.L << ", " << x_new.S << ") at tau=" << t_new
         << " left the unit square beyond slack " << cfg.invariance_slack;
      throw InvarianceBreachError(os.str(), t_new, x_new.L, x_new.S);
    }

    auto& seg = builder.stage_segment();
    seg.t0 = t;
    seg.h = h;
    const Vec2 w0 = second_derivative(p, y, k1);
    const Vec2 w1 = second_derivative(p, y_new, k7);
    for (int i = 0; i < 2; ++i) {
      seg.c[0][i] = y[i];
      seg.c[1][i] = y_new[i];
      seg.c[2][i] = h * k1[i];
      seg.c[3][i] = h * k7[i];
      seg.c[4][i] = h * h * w0[i];
      seg.c[5][i] = h * h * w1[i];
    }

    // Event scan: sub-sample the step so two crossings inside one long step
    // are not lost, then refine the first qualifying sub-bracket.
    std::optional<double> terminal_time;
    std::vector<EventRecord> step_events;
    if (!events.empty()) {
      constexpr int kSub = 4;
      std::array<double, kSub + 1> ts{};
      std::array<State, kSub + 1> xs{};
      for (int j = 0; j <= kSub; ++j) {
        ts[j] = j == kSub ? t_new : t + h * j / kSub;
        xs[j] = j == 0 ? State{y[0], y[1]} : (j == kSub ? x_new : builder.eval_staged(ts[j]));
      }
      for (std::size_t e = 0; e < events.size(); ++e) {
        const EventSpec& ev = events[e];
        double ga = g_prev[e];
        for (int j = 1; j <= kSub; ++j) {
          const double gb = ev.g(ts[j], xs[j]);
          bool rising = false;
          if (qualifies(ga, gb, ev.direction, rising)) {
            auto gfun = [&](double tau) { return ev.g(tau, builder.eval_staged(tau)); };
            const double te =
                find_root_bracketed(gfun, ts[j - 1], ts[j], ga, gb, kEventTimeTolerance).x;
            step_events.push_back({e, te, builder.eval_staged(te), rising});
            if (ev.terminal && (!terminal_time || te < *terminal_time)) {
              terminal_time = te;
            }
            if (ev.terminal) {
              break;
            }
          }
          ga = gb;
        }
        g_prev[e] = ev.g(t_new, x_new);
      }
      std::sort(step_events.begin(), step_events.end(),
                [](const EventRecord& a, const EventRecord& b) { return a.tau < b.tau; });
    }

    if (terminal_time) {
      const double te = *terminal_time;
      for (const auto& rec : step_events) {
        if (rec.tau <= te) {
          recorded.push_back(rec);
        }
      }
      // The located time may coincide with the step start; keep the mesh strictly increasing.
      if (te > t) {
        builder.commit(te, builder.eval_staged(te));
      }
      terminated = true;
      break;
    }
    recorded.insert(recorded.end(), step_events.begin(), step_events.end());

    builder.commit(t_new, x_new);
    t = t_new;
    y = y_new;
    k1 = k7;  // first same as last

    double fac = err == 0.0 ? kFacMax : kSafety * std::pow(err, -0.2);
    fac = std::clamp(fac, kFacMin, rejected_last ? 1.0 : kFacMax);
    h = std::min({h * fac, h_max, stability_cap(p, y)});
    rejected_last = false;
  }

  return IntegrationResult{std::move(builder).finish(), std::move(recorded), terminated};
}

double distance_to_equilibrium(const State& x, const State& eq) noexcept {
  return std::max(std::abs(x.L - eq.L), std::abs(x.S - eq.S));
}

ConvergenceResult convergence_time(const Params& p, const State& x0, double delta,
                                   const SolverConfig& cfg) {
  validate(p);
  validate(cfg);
  const State eq = require_interior_equilibrium(p);
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::InvalidArgument, "convergence radius delta must be > 0");
  }
  if (!x0.finite() || !x0.in_domain(0.0)) {
    throw Error(ErrorKind::InvalidState, "initial state must lie in [0, 1]^2");
  }
  if (distance_to_equilibrium(x0, eq) <= delta) {
    return {0.0, 0.0};
  }

  const EventSpec enter{
      [eq, delta](double, const State& x) { return distance_to_equilibrium(x, eq) - delta; },
      EventDirection::Falling, true};
  const IntegrationResult run = integrate(p, x0, cfg, std::span(&enter, 1));
  if (!run.terminated_by_event) {
    double closest = std::numeric_limits<double>::infinity();
    double t_closest = 0.0;
    const auto ts = run.trajectory.times();
    const auto xs = run.trajectory.states();
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double d = distance_to_equilibrium(xs[i], eq);
      if (d < closest) {
        closest = d;
        t_closest = ts[i];
      }
    }
    std::ostringstream os;
    os << "trajectory did not enter the delta=" << delta << " ball around E* before t_max="
       << cfg.t_max << " (closest approach " << closest << " at tau=" << t_closest << ")";
    throw HorizonExceededError(os.str(), closest, t_closest);
  }

  const double t_conv = run.events.back().tau;
  const double guard_end = std::min(cfg.t_max, 11.0 * t_conv);
  if (guard_end > t_conv) {
    // Small margin so the boundary point located by root finding does not
    // immediately register as an exit.
    const double exit_radius = delta * (1.0 + 1e-6);
    const EventSpec leave{
        [eq, exit_radius](double, const State& x) {
          return distance_to_equilibrium(x, eq) - exit_radius;
        },
        EventDirection::Rising, true};
    const IntegrationResult guard = integrate_span(p, run.trajectory.final_state(), t_conv,
                                                   guard_end, cfg, std::span(&leave, 1));
    if (guard.terminated_by_event) {
      std::ostringstream os;
      os << "trajectory re-left the delta=" << delta << " ball at tau=" << guard.events.back().tau
         << " after entering at tau=" << t_conv;
      throw Error(ErrorKind::ConvergenceReExit, os.str());
    }
  }
  return {t_conv, std::max(guard_end, t_conv)};
}

}  // namespace lvc
