#pragma once

// Interior-equilibrium classification over the (a12, a21) unit square and
// the analytic curves that bound the classes.
//
// The thresholds here are map constants. eps_balance is unrelated to the
// per-run corridor gap, and gamma_capacity is unrelated to the time-dependent
// corridor indicator.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "lvc/model.hpp"

namespace lvc {

struct MapThresholds {
  double eps_balance = 0.1;
  // L* + S* >= 1 on the whole square, so inside the band min(L*, S*) >
  // (1 - eps) / 2. Any gamma below that leaves BalancedLowCapacity empty.
  double gamma_capacity = 0.5;

  friend bool operator==(const MapThresholds&, const MapThresholds&) = default;
};

// eps_balance > 0, 0 < gamma_capacity < 1.
void validate(const MapThresholds& th);

// Integer codes are part of the CSV format; do not renumber.
enum class RegimeClass : std::uint8_t {
  StateLeaning = 0,         // L* > S*, unbalanced
  SocietyLeaning = 1,       // S* > L*, unbalanced
  CorridorCore = 2,         // |L* - S*| < eps and min(L*, S*) > gamma
  BalancedLowCapacity = 3,  // |L* - S*| < eps and min(L*, S*) <= gamma
};

inline constexpr int kRegimeClassCount = 4;

const char* to_string(RegimeClass c) noexcept;

// Classifies from already-computed equilibrium levels.
RegimeClass classify_levels(const State& eq, const MapThresholds& th) noexcept;

// Throws InvalidArgument unless 0 < a12 < 1 and 0 < a21 < 1.
RegimeClass classify_point(double a12, double a21, const MapThresholds& th);

struct RegimeCell {
  double a12 = 0.0;
  double a21 = 0.0;
  double L_star = 0.0;
  double S_star = 0.0;
  double eta = 0.0;
  RegimeClass cls = RegimeClass::StateLeaning;

  friend bool operator==(const RegimeCell&, const RegimeCell&) = default;
};

struct Polyline {
  std::vector<double> a12;
  std::vector<double> a21;

  [[nodiscard]] std::size_t size() const noexcept { return a12.size(); }
  [[nodiscard]] bool empty() const noexcept { return a12.empty(); }
};

struct GapContour {
  Polyline upper;  // a21 > a12: a21 = (a12 + eps) / (1 + eps a12)
  Polyline lower;  // a21 < a12: a21 = (a12 - eps) / (1 - eps a12)
};

enum class CapacityLevel { L, S };

struct RegimeGrid {
  std::size_t n = 0;
  MapThresholds thresholds;
  double rho = 1.0;
  std::vector<double> axis;      // shared cell-center coordinates (k + 1/2) / n
  std::vector<RegimeCell> cells; // row-major: index = i * n + j, a12 = axis[i], a21 = axis[j]
  Polyline symmetry;
  GapContour gap;
  Polyline capacity_L;
  Polyline capacity_S;

  [[nodiscard]] const RegimeCell& cell(std::size_t i, std::size_t j) const {
    return cells[i * n + j];
  }
  [[nodiscard]] std::array<std::size_t, kRegimeClassCount> class_counts() const;
};

// Points (t, t) for t sampled uniformly, restricted to the open square.
Polyline symmetry_line(std::size_t n_points);

// Both branches of |a21 - a12| = eps_balance * (1 - a12 a21), sampled over
// a12 and clipped to the open square. eps_balance = 0 collapses both onto
// the diagonal; an empty intersection yields empty polylines.
GapContour gap_contour(const MapThresholds& th, std::size_t n_points);

// L* = gamma: a12 = (1 - gamma) / (1 - gamma a21), sampled over a21.
// S* = gamma: a21 = (1 - gamma) / (1 - gamma a12), sampled over a12.
Polyline capacity_contour(const MapThresholds& th, CapacityLevel which, std::size_t n_points);

inline constexpr std::size_t kDefaultMapResolution = 512;
inline constexpr std::size_t kDefaultContourPoints = 513;

// Classifies every cell of an n x n grid with margin 1/(2n). Rows are
// distributed over worker threads; workers == 0 picks hardware concurrency.
RegimeGrid sweep(std::size_t n, const MapThresholds& th, double rho = 1.0,
                 std::size_t contour_points = kDefaultContourPoints, unsigned workers = 0);

}  // namespace lvc
