#include "lvc/regime_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "lvc/error.hpp"

namespace lvc {

void validate(const MapThresholds& th) {
  if (!(th.eps_balance > 0.0) || !std::isfinite(th.eps_balance)) {
    throw Error(ErrorKind::InvalidArgument, "eps_balance must be > 0");
  }
  if (!(th.gamma_capacity > 0.0 && th.gamma_capacity < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "gamma_capacity must satisfy 0 < gamma_capacity < 1");
  }
}

const char* to_string(RegimeClass c) noexcept {
  switch (c) {
    case RegimeClass::StateLeaning: return "state-leaning";
    case RegimeClass::SocietyLeaning: return "society-leaning";
    case RegimeClass::CorridorCore: return "corridor-core";
    case RegimeClass::BalancedLowCapacity: return "balanced-low-capacity";
  }
  return "unknown";
}

RegimeClass classify_levels(const State& eq, const MapThresholds& th) noexcept {
  if (std::abs(eq.L - eq.S) < th.eps_balance) {
    return std::min(eq.L, eq.S) > th.gamma_capacity ? RegimeClass::CorridorCore
                                                     : RegimeClass::BalancedLowCapacity;
  }
  return eq.L > eq.S ? RegimeClass::StateLeaning : RegimeClass::SocietyLeaning;
}

RegimeClass classify_point(double a12, double a21, const MapThresholds& th) {
  if (!(a12 > 0.0 && a12 < 1.0 && a21 > 0.0 && a21 < 1.0)) {
    std::ostringstream os;
    os << "regime classification requires 0 < a12, a21 < 1 (got a12=" << a12 << ", a21=" << a21
       << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  return classify_levels(*interior_equilibrium(Params{a12, a21, 1.0}), th);
}

std::array<std::size_t, kRegimeClassCount> RegimeGrid::class_counts() const {
  std::array<std::size_t, kRegimeClassCount> counts{};
  for (const auto& c : cells) {
    ++counts[static_cast<std::size_t>(c.cls)];
  }
  return counts;
}

namespace {

bool strictly_inside(double a12, double a21) {
  return a12 > 0.0 && a12 < 1.0 && a21 > 0.0 && a21 < 1.0;
}

template <class F>
Polyline sample_curve(std::size_t n_points, bool param_is_a12, F&& other) {
  Polyline out;
  if (n_points < 2) {
    return out;
  }
  for (std::size_t k = 0; k < n_points; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n_points - 1);
    const double v = other(t);
    const double a12 = param_is_a12 ? t : v;
    const double a21 = param_is_a12 ? v : t;
    if (std::isfinite(v) && strictly_inside(a12, a21)) {
      out.a12.push_back(a12);
      out.a21.push_back(a21);
    }
  }
  return out;
}

}  // namespace

Polyline symmetry_line(std::size_t n_points) {
  return sample_curve(n_points, true, [](double t) { return t; });
}

GapContour gap_contour(const MapThresholds& th, std::size_t n_points) {
  const double e = th.eps_balance;
  return GapContour{
      sample_curve(n_points, true, [e](double a12) { return (a12 + e) / (1.0 + e * a12); }),
      sample_curve(n_points, true, [e](double a12) { return (a12 - e) / (1.0 - e * a12); }),
  };
}

Polyline capacity_contour(const MapThresholds& th, CapacityLevel which, std::size_t n_points) {
  const double g = th.gamma_capacity;
  auto level = [g](double other) { return (1.0 - g) / (1.0 - g * other); };
  return which == CapacityLevel::L ? sample_curve(n_points, false, level)
                                   : sample_curve(n_points, true, level);
}

RegimeGrid sweep(std::size_t n, const MapThresholds& th, double rho, std::size_t contour_points,
                 unsigned workers) {
  if (n < 2) {
    throw Error(ErrorKind::InvalidArgument, "map resolution must be >= 2");
  }
  validate(th);
  validate(Params{0.5, 0.5, rho});

  RegimeGrid grid;
  grid.n = n;
  grid.thresholds = th;
  grid.rho = rho;
  grid.axis.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    grid.axis[k] = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
  }
  grid.cells.resize(n * n);

  auto fill_rows = [&](std::size_t row_begin, std::size_t row_step) {
    for (std::size_t i = row_begin; i < n; i += row_step) {
      for (std::size_t j = 0; j < n; ++j) {
        const Params p{grid.axis[i], grid.axis[j], rho};
        const State eq = *interior_equilibrium(p);
        grid.cells[i * n + j] = RegimeCell{p.a12, p.a21, eq.L, eq.S, p.eta(), classify_levels(eq, th)};
      }
    }
  };

  unsigned w = workers != 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
  w = static_cast<unsigned>(std::min<std::size_t>(w, n));
  if (w <= 1) {
    fill_rows(0, 1);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t) {
      pool.emplace_back(fill_rows, t, w);
    }
  }

  grid.symmetry = symmetry_line(contour_points);
  grid.gap = gap_contour(th, contour_points);
  grid.capacity_L = capacity_contour(th, CapacityLevel::L, contour_points);
  grid.capacity_S = capacity_contour(th, CapacityLevel::S, contour_points);
  return grid;
}

}  // namespace lvc
