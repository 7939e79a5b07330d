#include "lvc/model.hpp"

#include <cmath>
#include <sstream>

#include "lvc/error.hpp"

namespace lvc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::NoInteriorEquilibrium: return "no-interior-equilibrium";
    case ErrorKind::DegenerateGap: return "degenerate-gap";
    case ErrorKind::HorizonExceeded: return "horizon-exceeded";
    case ErrorKind::ConvergenceReExit: return "convergence-re-exit";
    case ErrorKind::StepUnderflow: return "step-underflow";
    case ErrorKind::InvarianceBreach: return "invariance-breach";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::Consistency: return "consistency";
  }
  return "unknown";
}

const char* to_string(StabilityClass c) noexcept {
  switch (c) {
    case StabilityClass::StableNode: return "stable node";
    case StabilityClass::StableFocus: return "stable focus";
    case StabilityClass::Saddle: return "saddle";
    case StabilityClass::UnstableNode: return "unstable node";
    case StabilityClass::UnstableFocus: return "unstable focus";
    case StabilityClass::NonHyperbolic: return "non-hyperbolic";
  }
  return "unknown";
}

void validate(const Params& p) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
  if (!std::isfinite(p.a12) || p.a12 < 0.0) {
    fail("a12 must be a finite value >= 0");
  }
  if (!std::isfinite(p.a21) || p.a21 < 0.0) {
    fail("a21 must be a finite value >= 0");
  }
  if (!std::isfinite(p.rho) || p.rho <= 0.0) {
    fail("rho must be a finite value > 0");
  }
}

Params Params::make(double a12, double a21, double rho) {
  Params p{a12, a21, rho};
  validate(p);
  return p;
}

bool State::finite() const noexcept { return std::isfinite(L) && std::isfinite(S); }

bool State::in_domain(double slack) const noexcept {
  return L >= -slack && L <= 1.0 + slack && S >= -slack && S <= 1.0 + slack;
}

namespace {

EigenPair ordered_real(double x, double y) {
  if (std::abs(x) >= std::abs(y)) {
    return {x, y};
  }
  return {y, x};
}

void require_finite(const State& x) {
  if (!x.finite()) {
    std::ostringstream os;
    os << "non-finite state (L=" << x.L << ", S=" << x.S << ")";
    throw Error(ErrorKind::InvalidState, os.str());
  }
}

}  // namespace

EigenPair eigenvalues_from_invariants(double trace, double det) {
  const double disc = trace * trace - 4.0 * det;
  if (disc >= 0.0) {
    const double q = 0.5 * (trace + std::copysign(std::sqrt(disc), trace));
    if (q == 0.0) {
      return {0.0, 0.0};
    }
    return ordered_real(q, det / q);
  }
  const double re = 0.5 * trace;
  const double im = 0.5 * std::sqrt(-disc);
  return {{re, im}, {re, -im}};
}

EigenPair eigenvalues(const Mat2& m) { return eigenvalues_from_invariants(m.trace(), m.det()); }

StabilityClass classify(const EigenPair& ev) {
  const double scale = std::max(1.0, std::abs(ev.first));
  const double zero_tol = 1e-14 * scale;
  const double r1 = ev.first.real();
  const double r2 = ev.second.real();
  if (std::abs(r1) <= zero_tol || std::abs(r2) <= zero_tol) {
    return StabilityClass::NonHyperbolic;
  }
  if (!ev.is_real()) {
    return r1 < 0.0 ? StabilityClass::StableFocus : StabilityClass::UnstableFocus;
  }
  if (r1 < 0.0 && r2 < 0.0) {
    return StabilityClass::StableNode;
  }
  if (r1 > 0.0 && r2 > 0.0) {
    return StabilityClass::UnstableNode;
  }
  return StabilityClass::Saddle;
}

Velocity vector_field(const Params& p, const State& x) {
  require_finite(x);
  return vector_field_unchecked(p, x.L, x.S);
}

Mat2 jacobian(const Params& p, const State& x) {
  require_finite(x);
  const double L = x.L;
  const double S = x.S;
  return Mat2{
      1.0 - 2.0 * L - p.a12 * S,
      -p.a12 * L,
      -p.rho * p.a21 * S,
      p.rho * (1.0 - 2.0 * S - p.a21 * L),
  };
}

std::optional<State> interior_equilibrium(const Params& p) {
  if (!(p.a12 < 1.0 && p.a21 < 1.0)) {
    return std::nullopt;
  }
  const double eta = p.eta();
  return State{(1.0 - p.a12) / eta, (1.0 - p.a21) / eta};
}

State require_interior_equilibrium(const Params& p) {
  auto eq = interior_equilibrium(p);
  if (!eq) {
    std::ostringstream os;
    os << "no interior equilibrium for a12=" << p.a12 << ", a21=" << p.a21
       << " (requires a12 < 1 and a21 < 1)";
    throw Error(ErrorKind::NoInteriorEquilibrium, os.str());
  }
  return *eq;
}

std::array<EquilibriumRecord, 3> boundary_spectra(const Params& p) {
  if (!(p.a12 > 0.0 && p.a12 < 1.0 && p.a21 > 0.0 && p.a21 < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "boundary spectra require 0 < a12 < 1 and 0 < a21 < 1");
  }
  const State origin{0.0, 0.0};
  const State state_corner{1.0, 0.0};
  const State society_corner{0.0, 1.0};
  return {
      EquilibriumRecord{origin, jacobian(p, origin), ordered_real(1.0, p.rho),
                        StabilityClass::UnstableNode},
      EquilibriumRecord{state_corner, jacobian(p, state_corner),
                        ordered_real(-1.0, p.rho * (1.0 - p.a21)), StabilityClass::Saddle},
      EquilibriumRecord{society_corner, jacobian(p, society_corner),
                        ordered_real(1.0 - p.a12, -p.rho), StabilityClass::Saddle},
  };
}

EquilibriumReport analyze_equilibria(const Params& p) {
  EquilibriumReport report{std::nullopt, boundary_spectra(p)};
  if (auto eq = interior_equilibrium(p)) {
    const Mat2 j = jacobian(p, *eq);
    const EigenPair ev = eigenvalues(j);
    report.interior = EquilibriumRecord{*eq, j, ev, classify(ev)};
  }
  return report;
}

SpectralSummary interior_spectrum(const Params& p) {
  const State eq = require_interior_equilibrium(p);
  const double Ls = eq.L;
  const double Ss = eq.S;
  SpectralSummary out;
  out.eta = p.eta();
  out.trace = -(Ls + p.rho * Ss);
  out.det = p.rho * Ls * Ss * out.eta;
  const EigenPair ev = eigenvalues_from_invariants(out.trace, out.det);
  out.lambda_fast = ev.first.real();
  out.lambda_slow = ev.second.real();
  out.slow_estimate = -p.rho * Ls * Ss * out.eta / (Ls + p.rho * Ss);
  out.timescale_ratio = std::abs(out.lambda_fast) / std::abs(out.lambda_slow);
  return out;
}

Params near_critical_family(double eta, double a12, double rho) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "near-critical family requires 0 < eta < 1");
  }
  if (!(a12 > 1.0 - eta && a12 < 1.0)) {
    std::ostringstream os;
    os << "near-critical family requires 1 - eta < a12 < 1 (got a12=" << a12 << ", eta=" << eta
       << "); otherwise a21 = (1 - eta)/a12 leaves (0, 1) and the interior equilibrium is lost";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  return Params::make(a12, (1.0 - eta) / a12, rho);
}

Params symmetric_near_critical(double eta, double rho) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "near-critical family requires 0 < eta < 1");
  }
  const double a = std::sqrt(1.0 - eta);
  return Params::make(a, a, rho);
}

}  // namespace lvc
