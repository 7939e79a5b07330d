#pragma once

// Normalized two-species competitive Lotka-Volterra system on the unit square:
//
//   dL/dtau = L (1 - L - a12 S)
//   dS/dtau = rho S (1 - S - a21 L)
//
// plus its equilibria and the local spectral structure at each of them.

#include <array>
#include <complex>
#include <optional>

namespace lvc {

// Model constants for one system instance. eta = 1 - a12*a21 is always
// derived, never stored.
struct Params {
  double a12 = 0.0;
  double a21 = 0.0;
  double rho = 1.0;

  // Validating factory: a12, a21 >= 0 and finite, rho > 0 and finite.
  static Params make(double a12, double a21, double rho = 1.0);

  [[nodiscard]] double eta() const noexcept { return 1.0 - a12 * a21; }

  // Params with the two interaction coefficients exchanged.
  [[nodiscard]] Params swapped() const noexcept { return Params{a21, a12, rho}; }

  friend bool operator==(const Params&, const Params&) = default;
};

// Throws InvalidArgument if p breaks the Params invariants.
void validate(const Params& p);

inline constexpr double kDefaultDomainSlack = 1e-6;

struct State {
  double L = 0.0;
  double S = 0.0;

  [[nodiscard]] bool finite() const noexcept;

  // Inside [-slack, 1 + slack]^2.
  [[nodiscard]] bool in_domain(double slack = kDefaultDomainSlack) const noexcept;

  friend bool operator==(const State&, const State&) = default;
};

struct Velocity {
  double dL = 0.0;
  double dS = 0.0;
};

// Row-major 2x2 real matrix.
struct Mat2 {
  double a00 = 0.0;
  double a01 = 0.0;
  double a10 = 0.0;
  double a11 = 0.0;

  [[nodiscard]] double trace() const noexcept { return a00 + a11; }
  [[nodiscard]] double det() const noexcept { return a00 * a11 - a01 * a10; }
};

// Eigenvalue pair ordered by magnitude: |first| >= |second|. For a complex
// pair, first carries the positive imaginary part.
struct EigenPair {
  std::complex<double> first;
  std::complex<double> second;

  [[nodiscard]] bool is_real() const noexcept { return first.imag() == 0.0 && second.imag() == 0.0; }
};

enum class StabilityClass {
  StableNode,
  StableFocus,
  Saddle,
  UnstableNode,
  UnstableFocus,
  NonHyperbolic,
};

const char* to_string(StabilityClass c) noexcept;

// Roots of lambda^2 - tr*lambda + det = 0. The larger-magnitude root is
// formed first and the smaller one recovered from the product, so the small
// root keeps full relative accuracy when det << tr^2.
EigenPair eigenvalues_from_invariants(double trace, double det);
EigenPair eigenvalues(const Mat2& m);

// Generic classification from an eigenvalue pair.
StabilityClass classify(const EigenPair& ev);

// Evaluates the right-hand side exactly as written above. Throws
// InvalidState on non-finite input; bounds are not checked so the field can
// be evaluated at slightly-overshooting solver stages.
Velocity vector_field(const Params& p, const State& x);

// Unchecked kernel used by the integrator hot loop.
inline Velocity vector_field_unchecked(const Params& p, double L, double S) noexcept {
  return Velocity{L * (1.0 - L - p.a12 * S), p.rho * S * (1.0 - S - p.a21 * L)};
}

Mat2 jacobian(const Params& p, const State& x);

// Coexistence equilibrium (L*, S*) = ((1-a12)/eta, (1-a21)/eta). Present iff
// a12 < 1 and a21 < 1 (both components strictly positive); independent of rho.
std::optional<State> interior_equilibrium(const Params& p);

// Same, but throws NoInteriorEquilibrium when absent.
State require_interior_equilibrium(const Params& p);

struct EquilibriumRecord {
  State point;
  Mat2 jacobian;
  EigenPair eigen;
  StabilityClass stability = StabilityClass::NonHyperbolic;
};

// (0,0), (1,0), (0,1) with spectra taken from the closed forms
//   (0,0): {1, rho}            unstable node
//   (1,0): {-1, rho(1 - a21)}  saddle
//   (0,1): {1 - a12, -rho}     saddle
// Requires 0 < a12 < 1 and 0 < a21 < 1.
std::array<EquilibriumRecord, 3> boundary_spectra(const Params& p);

struct EquilibriumReport {
  std::optional<EquilibriumRecord> interior;
  std::array<EquilibriumRecord, 3> boundary;
};

EquilibriumReport analyze_equilibria(const Params& p);

// Spectrum at E*. The two eigenvalues are always real for this system
// (discriminant = (L* - rho S*)^2 + 4 rho L* S* a12 a21 >= 0).
struct SpectralSummary {
  double lambda_fast = 0.0;    // larger magnitude
  double lambda_slow = 0.0;    // smaller magnitude
  double trace = 0.0;
  double det = 0.0;
  double eta = 0.0;
  double slow_estimate = 0.0;  // -rho L* S* eta / (L* + rho S*)
  double timescale_ratio = 0.0;
};

// Throws NoInteriorEquilibrium when E* is absent.
SpectralSummary interior_spectrum(const Params& p);

// Near-critical one-parameter family: a21 = (1 - eta)/a12 so that
// a12*a21 = 1 - eta (to rounding) with both coefficients in (1 - eta, 1).
// Requires 0 < eta < 1 and 1 - eta < a12 < 1.
Params near_critical_family(double eta, double a12, double rho = 1.0);

// The symmetric member a12 = a21 = sqrt(1 - eta).
Params symmetric_near_critical(double eta, double rho = 1.0);

}  // namespace lvc
