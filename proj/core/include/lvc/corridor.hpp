#pragma once

// Corridor indicator: the equilibrium gap eps = |L* - S*| and the normalized
// deviation gamma(tau) = |L(tau) - S(tau)| / eps. Phases with gamma <= 1 are
// corridor dwell intervals.

#include <cstddef>
#include <vector>

#include "lvc/integrator.hpp"
#include "lvc/model.hpp"

namespace lvc {

inline constexpr double kDefaultEpsMin = 1e-9;
inline constexpr std::size_t kDefaultCorridorSamples = 20001;
// Class changes with |gamma - 1| never exceeding this are not resolvable.
// Near E* the state agrees with L* and S* to roundoff and gamma flickers
// around 1 at the 1e-15 level.
inline constexpr double kDefaultGammaResolution = 1e-9;

// |L* - S*|. Throws NoInteriorEquilibrium when E* is absent.
double equilibrium_gap(const Params& p);

// Same quantity via |a21 - a12| / eta.
double equilibrium_gap_from_coefficients(const Params& p);

// Caches eps for repeated evaluation along a trajectory.
class CorridorIndicator {
 public:
  // Throws DegenerateGap when eps < eps_min (symmetric parameters).
  explicit CorridorIndicator(const Params& p, double eps_min = kDefaultEpsMin);

  [[nodiscard]] double gap() const noexcept { return gap_; }
  [[nodiscard]] double operator()(const State& x) const noexcept;

 private:
  double gap_;
};

double indicator(const Params& p, const State& x, double eps_min = kDefaultEpsMin);

struct CorridorInterval {
  double entry = 0.0;
  double exit = 0.0;

  [[nodiscard]] double length() const noexcept { return exit - entry; }
};

struct CorridorSeries {
  double gap_epsilon = 0.0;
  double horizon = 0.0;
  std::vector<double> tau;
  std::vector<double> gamma;
  // Disjoint, sorted, non-empty closed intervals on which gamma <= 1.
  std::vector<CorridorInterval> intervals;
  double dwell_total = 0.0;
  double dwell_fraction = 0.0;
  double resolution = 0.0;
};

// Samples gamma on n_samples uniform points of the trajectory span via the
// dense output and locates each entry/exit between consecutive samples by
// root-finding on gamma(tau) - 1. A class change counts only once a later
// sample lies outside the band |gamma - 1| <= resolution on the new side;
// excursions that stay inside the band are treated like tangencies and
// dropped, as are zero-length intervals. The span ends may open or close an
// interval without a crossing; the first sample is classified literally.
// Throws Consistency when traj was produced under different Params.
CorridorSeries corridor_analysis(const Params& p, const Trajectory& traj,
                                 std::size_t n_samples = kDefaultCorridorSamples,
                                 double eps_min = kDefaultEpsMin,
                                 double resolution = kDefaultGammaResolution);

}  // namespace lvc
