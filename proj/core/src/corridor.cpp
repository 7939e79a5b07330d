#include "lvc/corridor.hpp"

#include <cmath>
#include <sstream>

#include "lvc/error.hpp"
#include "lvc/root_finding.hpp"

namespace lvc {

double equilibrium_gap(const Params& p) {
  const State eq = require_interior_equilibrium(p);
  return std::abs(eq.L - eq.S);
}

double equilibrium_gap_from_coefficients(const Params& p) {
  require_interior_equilibrium(p);
  return std::abs(p.a21 - p.a12) / p.eta();
}

CorridorIndicator::CorridorIndicator(const Params& p, double eps_min) : gap_(equilibrium_gap(p)) {
  if (gap_ < eps_min) {
    std::ostringstream os;
    os << "equilibrium gap |L* - S*| = " << gap_ << " is below " << eps_min
       << "; the corridor indicator is undefined for symmetric parameters (a12 = a21 = " << p.a12
       << ")";
    throw Error(ErrorKind::DegenerateGap, os.str());
  }
}

double CorridorIndicator::operator()(const State& x) const noexcept {
  return std::abs(x.L - x.S) / gap_;
}

double indicator(const Params& p, const State& x, double eps_min) {
  return CorridorIndicator(p, eps_min)(x);
}

CorridorSeries corridor_analysis(const Params& p, const Trajectory& traj, std::size_t n_samples,
                                 double eps_min, double resolution) {
  if (!(traj.params() == p)) {
    throw Error(ErrorKind::Consistency,
                "trajectory was produced under different parameters than requested");
  }
  if (n_samples < 2) {
    throw Error(ErrorKind::InvalidArgument, "corridor analysis needs at least 2 samples");
  }
  if (!(resolution >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "gamma resolution must be >= 0");
  }
  const CorridorIndicator gamma(p, eps_min);

  const double t0 = traj.t_begin();
  const double t1 = traj.t_end();
  CorridorSeries out;
  out.gap_epsilon = gamma.gap();
  out.horizon = t1 - t0;
  out.resolution = resolution;
  out.tau.resize(n_samples);
  out.gamma.resize(n_samples);
  const double dt = (t1 - t0) / static_cast<double>(n_samples - 1);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double tau = k + 1 == n_samples ? t1 : t0 + dt * static_cast<double>(k);
    out.tau[k] = tau;
    out.gamma[k] = gamma(traj.at(tau));
  }

  auto g = [&](double tau) { return gamma(traj.at(tau)) - 1.0; };
  auto is_inside = [&](std::size_t k) { return out.gamma[k] <= 1.0; };
  auto decisive = [&](std::size_t k) { return std::abs(out.gamma[k] - 1.0) > resolution; };

  bool inside = is_inside(0);
  std::size_t anchor = 0;  // last sample whose class is settled
  double entry = t0;
  auto close = [&](double exit) {
    if (exit > entry) {
      out.intervals.push_back({entry, exit});
    }
  };
  for (std::size_t k = 1; k < n_samples; ++k) {
    if (!decisive(k)) {
      continue;
    }
    if (is_inside(k) == inside) {
      anchor = k;
      continue;
    }
    // Genuine transition between anchor and k. Samples in between sit within
    // the resolution band; the crossing is the first literal class change.
    std::size_t m = anchor;
    while (is_inside(m + 1) == inside) ++m;
    const double tc = find_root_bracketed(g, out.tau[m], out.tau[m + 1], out.gamma[m] - 1.0,
                                          out.gamma[m + 1] - 1.0, kEventTimeTolerance)
                          .x;
    if (inside) {
      close(tc);
    } else {
      entry = tc;
    }
    inside = !inside;
    anchor = k;
  }
  if (inside) {
    close(t1);
  }

  for (const auto& iv : out.intervals) {
    out.dwell_total += iv.length();
  }
  out.dwell_fraction = out.dwell_total / out.horizon;
  return out;
}

}  // namespace lvc
