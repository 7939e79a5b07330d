// Acceptance gate. Each criterion prints one line:
//   [PASS] / [FAIL] / [XFAIL] <id> <name>: <measurements> (<seconds> s, budget <b> s)
// XFAIL marks a check that cannot hold as literally stated, either in IEEE
// binary64 or for the dynamics themselves, with the reason cross-checked
// against an oracle; it is reported, never hidden, and does not fail the
// binary. Any FAIL does.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lvc/corridor.hpp"
#include "lvc/error.hpp"
#include "lvc/integrator.hpp"
#include "lvc/model.hpp"
#include "lvc/regime_map.hpp"
#include "oracles.hpp"

#ifdef LVC_ACCEPTANCE_WITH_CLI
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "cli/commands.hpp"
#endif

using namespace lvc;
using oracle::rel_err;

namespace {

enum class Verdict { Pass, Fail, XFail };

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

class Report {
 public:
  void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& ex) {
      o = {Verdict::Fail, std::string("exception: ") + ex.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s && o.verdict != Verdict::Fail) {
      o.verdict = Verdict::Fail;
      o.detail += "; over runtime budget";
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::XFail ? "XFAIL" : "FAIL";
    std::printf("[%s] %d %s: %s (%.3f s, budget %g s)\n", tag, id, name, o.detail.c_str(), secs,
                budget_s);
    std::fflush(stdout);
    if (o.verdict == Verdict::Fail) ++failures_;
    if (o.verdict == Verdict::XFail) ++xfailures_;
  }
  [[nodiscard]] int failures() const { return failures_; }
  [[nodiscard]] int xfailures() const { return xfailures_; }

 private:
  int failures_ = 0;
  int xfailures_ = 0;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)};
}

Params random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(1e-3, 1.0 - 1e-3);
  std::uniform_real_distribution<double> logrho(std::log(0.1), std::log(10.0));
  return Params{coef(rng), coef(rng), std::exp(logrho(rng))};
}

const Params kBase{0.48, 0.55, 1.0};
const Params kStateLeaning{0.50, 0.70, 1.0};
const Params kSocietyLeaning{0.75, 0.45, 1.0};

const std::array<State, 3> kDefaultIcs{State{0.2, 0.8}, State{0.8, 0.2}, State{0.5, 0.1}};

// ------------------------------------------------------------------- 1
Outcome equilibrium_formulas() {
  struct Case {
    Params p;
    double L, S;        // exact fractions (1 - a12)/eta, (1 - a21)/eta
    double L7, S7;      // seven-digit hand values
  };
  const Case cases[] = {
      {kBase, 0.52 / 0.736, 0.45 / 0.736, 0.7065217, 0.6114130},
      {kStateLeaning, 0.50 / 0.65, 0.30 / 0.65, 0.7692308, 0.4615385},
      {kSocietyLeaning, 0.25 / 0.6625, 0.55 / 0.6625, 0.3773585, 0.8301887},
  };
  double worst = 0.0, worst_hand = 0.0;
  for (const auto& c : cases) {
    const State e = *interior_equilibrium(c.p);
    const oracle::Pair lu = oracle::equilibrium_lu(c.p.a12, c.p.a21);
    worst = std::max({worst, rel_err(e.L, c.L), rel_err(e.S, c.S), rel_err(e.L, lu.L),
                      rel_err(e.S, lu.S)});
    worst_hand = std::max({worst_hand, std::abs(e.L - c.L7), std::abs(e.S - c.S7)});
  }
  return verdict(worst <= 1e-12 && worst_hand <= 5e-8,
                 "max rel err " + fmt("%.2e", worst) + " vs exact fractions and LU solve; " +
                     "max abs diff to 7-digit values " + fmt("%.2e", worst_hand));
}

// ------------------------------------------------------------------- 2
Outcome jacobian_identities() {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Params p = random_params(rng);
    const State e = *interior_equilibrium(p);
    const Mat2 J = jacobian(p, e);
    const double tr = -(e.L + p.rho * e.S);
    const double det = p.rho * e.L * e.S * p.eta();
    const SpectralSummary s = interior_spectrum(p);
    worst = std::max({worst, rel_err(J.trace(), tr), rel_err(J.det(), det),
                      rel_err(s.lambda_fast + s.lambda_slow, tr),
                      rel_err(s.lambda_fast * s.lambda_slow, det)});
  }
  return verdict(worst <= 1e-12, "1000 random params, max rel err " + fmt("%.2e", worst));
}

// ------------------------------------------------------------------- 3
Outcome integrator_oracle() {
  SolverConfig cfg;
  cfg.t_max = 20.0;
  const auto r = integrate(Params{0.0, 0.0, 1.0}, State{0.1, 0.1}, cfg);
  double logistic_err = 0.0;
  for (int k = 0; k <= 20000; ++k) {
    const double tau = 20.0 * k / 20000.0;
    const State x = r.trajectory.at(tau);
    const double ref = oracle::logistic(0.1, 1.0, tau);
    logistic_err = std::max({logistic_err, std::abs(x.L - ref), std::abs(x.S - ref)});
  }
  double rk4_err = 0.0;
  for (const State x0 : {State{0.9, 0.9}, State{0.2, 0.25}, kDefaultIcs[0], kDefaultIcs[1],
                         kDefaultIcs[2]}) {
    const State f = integrate(kBase, x0, SolverConfig{}).trajectory.final_state();
    const oracle::Pair ref = oracle::rk4(0.48, 0.55, 1.0, {x0.L, x0.S}, 200.0, 1e-4);
    rk4_err = std::max({rk4_err, std::abs(f.L - ref.L), std::abs(f.S - ref.S)});
  }
  return verdict(logistic_err <= 1e-6 && rk4_err <= 1e-6,
                 "logistic max err " + fmt("%.2e", logistic_err) + " on [0, 20]; RK4(1e-4) " +
                     "final-state diff " + fmt("%.2e", rk4_err) + " over 5 starts at default parameters");
}

// ------------------------------------------------------------------- 4
Outcome positive_invariance() {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double lo = INFINITY, hi = -INFINITY;
  std::size_t states = 0;
  for (int k = 0; k < 100; ++k) {
    const Params p = random_params(rng);
    for (int m = 0; m < 100; ++m) {
      const auto r = integrate(p, State{unit(rng), unit(rng)}, SolverConfig{});
      for (const State& x : r.trajectory.states()) {
        lo = std::min({lo, x.L, x.S});
        hi = std::max({hi, x.L, x.S});
      }
      states += r.trajectory.states().size();
    }
  }
  return verdict(lo >= -1e-6 && hi <= 1.0 + 1e-6,
                 "10000 runs, " + std::to_string(states) + " accepted states, min " +
                     fmt("%.3e", lo) + ", max " + fmt("%.17g", hi));
}

// ------------------------------------------------------------------- 5
Outcome slow_scaling() {
  const double etas[] = {0.2, 0.1, 0.05, 0.025, 0.0125};
  const State x0{0.3, 0.6};
  std::vector<double> xs, ys;
  std::ostringstream times;
  for (double eta : etas) {
    const Params p = symmetric_near_critical(eta);
    SolverConfig cfg;
    cfg.t_max = std::max(cfg.t_max, 25.0 / std::abs(interior_spectrum(p).lambda_slow));
    const double t = convergence_time(p, x0, 1e-3, cfg).t_conv;
    xs.push_back(std::log(eta));
    ys.push_back(std::log(t));
    times << (times.tellp() > 0 ? "," : "") << fmt("%.4g", t);
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const SpectralSummary s = interior_spectrum(symmetric_near_critical(0.01));
  const double dev = rel_err(s.lambda_slow, s.slow_estimate);
  return verdict(slope >= -1.15 && slope <= -0.85 && dev <= 0.10,
                 "slope " + fmt("%.4f", slope) + " (T_conv " + times.str() +
                     "); lambda_slow vs slow_estimate at eta=0.01 rel dev " + fmt("%.2e", dev));
}

// ------------------------------------------------------------------- 6
struct OracleVisit {
  double min_excess;  // min gamma - 1 while the state is resolvable from E*
  bool visits;
};

// Fixed-step RK4 walk with the gap computed from the coefficients. Samples
// within 1e-10 of E* are skipped: there gamma is roundoff.
OracleVisit oracle_visit(State x0) {
  const double a12 = kBase.a12, a21 = kBase.a21;
  const oracle::Pair e = oracle::equilibrium_lu(a12, a21);
  const double eps = std::abs(a21 - a12) / (1.0 - a12 * a21);
  oracle::Pair x{x0.L, x0.S};
  OracleVisit v{std::abs(x.L - x.S) / eps - 1.0, false};
  for (int k = 0; k < 4000; ++k) {
    x = oracle::rk4(a12, a21, 1.0, x, 0.05, 1e-3);
    if (std::max(std::abs(x.L - e.L), std::abs(x.S - e.S)) < 1e-10) break;
    v.min_excess = std::min(v.min_excess, std::abs(x.L - x.S) / eps - 1.0);
  }
  v.visits = v.min_excess <= 0.0;
  return v;
}

Outcome corridor_behavior() {
  bool mesh_ok = true, dwell_literal = true, dwell_explained = true;
  std::size_t samples = 0, exact = 0;
  double worst_ulps = 0.0;
  std::ostringstream runs;
  for (const State& x0 : kDefaultIcs) {
    const Trajectory tr = integrate(kBase, x0, SolverConfig{}).trajectory;
    const CorridorSeries a = corridor_analysis(kBase, tr, 10000);
    const CorridorSeries b = corridor_analysis(kBase, tr, 20000);
    const OracleVisit ov = oracle_visit(x0);
    const bool dwell = a.dwell_total > 0.0 && b.dwell_total > 0.0;
    dwell_literal = dwell_literal && dwell;
    // A zero dwell is acceptable only when the oracle agrees the start never
    // enters the corridor before merging with E*.
    dwell_explained = dwell_explained && (dwell ? ov.visits : !ov.visits && a.dwell_total == 0.0);
    mesh_ok = mesh_ok && a.intervals.size() == b.intervals.size() &&
              std::abs(a.dwell_total - b.dwell_total) <= 1e-6 * std::max(1.0, b.dwell_total);
    runs << " (" << x0.L << "," << x0.S << "): dwell " << fmt("%.4g", b.dwell_total) << ", "
         << a.intervals.size() << "/" << b.intervals.size() << " intervals, oracle min gamma-1 "
         << fmt("%.2e", ov.min_excess) << ";";
    for (const CorridorSeries* s : {&a, &b}) {
      for (std::size_t i = 0; i < s->tau.size(); ++i) {
        const State x = tr.at(s->tau[i]);
        const double d = std::abs(x.L - x.S);
        const double back = s->gamma[i] * s->gap_epsilon;
        ++samples;
        if (back == d) {
          ++exact;
        } else {
          worst_ulps = std::max(worst_ulps, std::abs(back - d) / std::ldexp(d, -52));
        }
      }
    }
  }
  std::string detail = runs.str().substr(1) + " gamma*eps == |L-S| bit-exact at " + std::to_string(exact) +
                       "/" + std::to_string(samples) + " samples, worst " +
                       fmt("%.2f", worst_ulps) + " x 2^-52 relative";
  if (!mesh_ok || !dwell_explained || worst_ulps > 1.0) return {Verdict::Fail, detail};
  if (!dwell_literal || exact != samples) {
    // fl(fl(d / eps) * eps) cannot equal d for every binary64 d, and starts
    // that approach E* from gamma > 1 have no dwell to measure.
    return {Verdict::XFail, detail + "; literal dwell > 0 at every default start and the "
                                     "bit-exact identity are not attainable"};
  }
  return {Verdict::Pass, detail};
}

// ------------------------------------------------------------------- 7
Outcome regime_map() {
  const std::size_t n = 512;
  const MapThresholds th;
  const RegimeGrid grid = sweep(n, th, 1.0);
  bool sign_ok = true, transpose_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const RegimeCell& c = grid.cell(i, j);
      const bool state = c.cls == RegimeClass::StateLeaning;
      const bool society = c.cls == RegimeClass::SocietyLeaning;
      if (state && !(c.a21 > c.a12)) sign_ok = false;
      if (society && !(c.a12 > c.a21)) sign_ok = false;
      const RegimeClass t = grid.cell(j, i).cls;
      const RegimeClass want = state     ? RegimeClass::SocietyLeaning
                               : society ? RegimeClass::StateLeaning
                                         : c.cls;
      if (t != want) transpose_ok = false;
    }
  }
  const auto counts = grid.class_counts();
  bool all_present = true;
  for (std::size_t c : counts) all_present = all_present && c > 0;

  double contour_err = 0.0;
  std::size_t points = 0;
  for (const Polyline* pl : {&grid.gap.upper, &grid.gap.lower}) {
    for (std::size_t k = 0; k < pl->size(); ++k, ++points) {
      const State e = *interior_equilibrium(Params{pl->a12[k], pl->a21[k], 1.0});
      contour_err = std::max(contour_err, std::abs(std::abs(e.L - e.S) - th.eps_balance));
    }
  }
  for (std::size_t k = 0; k < grid.capacity_L.size(); ++k, ++points) {
    const State e = *interior_equilibrium(Params{grid.capacity_L.a12[k], grid.capacity_L.a21[k], 1.0});
    contour_err = std::max(contour_err, std::abs(e.L - th.gamma_capacity));
  }
  for (std::size_t k = 0; k < grid.capacity_S.size(); ++k, ++points) {
    const State e = *interior_equilibrium(Params{grid.capacity_S.a12[k], grid.capacity_S.a21[k], 1.0});
    contour_err = std::max(contour_err, std::abs(e.S - th.gamma_capacity));
  }
  bool rho_ok = true;
  for (double rho : {0.5, 2.0}) {
    const RegimeGrid g2 = sweep(n, th, rho);
    rho_ok = rho_ok && g2.cells == grid.cells && g2.gap.upper.a21 == grid.gap.upper.a21 &&
             g2.capacity_L.a12 == grid.capacity_L.a12;
  }
  std::ostringstream os;
  os << "counts state/society/core/low-capacity " << counts[0] << "/" << counts[1] << "/"
     << counts[2] << "/" << counts[3] << " (thresholds eps=" << th.eps_balance
     << ", gamma=" << th.gamma_capacity << "); sign rule " << (sign_ok ? "ok" : "VIOLATED")
     << "; transpose " << (transpose_ok ? "ok" : "MISMATCH") << "; " << points
     << " contour points max residual " << fmt("%.2e", contour_err) << "; rho-independence "
     << (rho_ok ? "ok" : "MISMATCH");
  return verdict(sign_ok && transpose_ok && all_present && contour_err <= 1e-10 && rho_ok && points > 0,
                 os.str());
}

// ------------------------------------------------------------------- 8
#ifdef LVC_ACCEPTANCE_WITH_CLI
namespace fs = std::filesystem;

struct ScratchDir {
  fs::path path;
  ScratchDir() {
    path = fs::temp_directory_path() / ("lvc_acceptance_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  std::ostringstream diag;
  return cli::run(args, diag);
}
#endif

Outcome asymmetric_transients() {
  std::ostringstream os;
  bool ok = true;
  struct Case {
    Params p;
    bool state_leaning;
  };
  for (const Case& c : {Case{kStateLeaning, true}, Case{kSocietyLeaning, false}}) {
    const State e = *interior_equilibrium(c.p);
    const bool ordering = c.state_leaning ? e.L > e.S : e.S > e.L;
    double worst = 0.0;
    for (const State x0 : {kDefaultIcs[0], kDefaultIcs[1], kDefaultIcs[2], State{0.5, 0.5}}) {
      const State f = integrate(c.p, x0, SolverConfig{}).trajectory.final_state();
      worst = std::max(worst, distance_to_equilibrium(f, e));
    }
    std::string reported = "n/a";
#ifdef LVC_ACCEPTANCE_WITH_CLI
    ScratchDir dir;
    const std::string prefix = (dir.path / "s").string();
    std::ostringstream a12, a21;
    a12.precision(17);
    a21.precision(17);
    a12 << c.p.a12;
    a21 << c.p.a21;
    if (cli({"simulate", "--a12", a12.str(), "--a21", a21.str(), "--l0", "0.5", "--s0", "0.5",
             "--out", prefix}) != 0) {
      ok = false;
    } else {
      const auto j = nlohmann::json::parse(slurp(prefix + "_summary.json"));
      reported = j.at("equilibrium_ordering").get<std::string>();
      const bool cli_ok = c.state_leaning ? j.at("Lstar").get<double>() > j.at("Sstar").get<double>()
                                          : j.at("Sstar").get<double>() > j.at("Lstar").get<double>();
      ok = ok && cli_ok && reported == (c.state_leaning ? "state-leaning" : "society-leaning");
    }
#endif
    ok = ok && ordering && worst <= 1e-3;
    os << "(" << c.p.a12 << "," << c.p.a21 << "): L*=" << fmt("%.7f", e.L) << " S*="
       << fmt("%.7f", e.S) << " summary '" << reported << "', max final distance "
       << fmt("%.2e", worst) << "; ";
  }
  return verdict(ok, os.str());
}

// ------------------------------------------------------------------- 9
Outcome reproducibility() {
#ifdef LVC_ACCEPTANCE_WITH_CLI
  ScratchDir dir;
  struct Case {
    std::vector<std::string> args;
    std::vector<std::string> payloads;
  };
  const std::vector<Case> cases = {
      {{"simulate", "--l0", "0.2", "--s0", "0.25"}, {"timeseries.csv", "summary.json"}},
      {{"simulate", "--a12", "0.5", "--a21", "0.5"}, {"timeseries.csv", "summary.json"}},
      {{"map"}, {"raster.csv", "contours.csv", "summary.json"}},
      {{"scaling"}, {"scaling.csv", "summary.json"}},
      {{"corridor"}, {"intervals.csv", "dwell.json"}},
      {{"corridor", "--synthetic-equilibrium"}, {"intervals.csv", "dwell.json"}},
  };
  std::size_t compared = 0, identical = 0;
  int k = 0;
  for (const auto& c : cases) {
    const std::string a = (dir.path / ("run" + std::to_string(k))).string();
    const std::string b = (dir.path / ("replay" + std::to_string(k))).string();
    ++k;
    auto args = c.args;
    args.insert(args.end(), {"--out", a});
    if (cli(args) != 0) return {Verdict::Fail, "command failed: " + c.args[0]};
    if (cli({c.args[0], "--manifest", a + "_manifest.json", "--out", b}) != 0) {
      return {Verdict::Fail, "replay failed: " + c.args[0]};
    }
    for (const auto& f : c.payloads) {
      ++compared;
      identical += slurp(a + "_" + f) == slurp(b + "_" + f);
    }
  }
  return verdict(compared == identical, std::to_string(identical) + "/" + std::to_string(compared) +
                                            " payload files byte-identical across " +
                                            std::to_string(cases.size()) + " manifest replays");
#else
  return {Verdict::Fail, "built without the command-line tool"};
#endif
}

}  // namespace

int main() {
  Report r;
  r.criterion(1, "equilibrium formulas", 1.0, equilibrium_formulas);
  r.criterion(2, "jacobian identities", 1.0, jacobian_identities);
  r.criterion(3, "integrator oracle", 5.0, integrator_oracle);
  r.criterion(4, "positive invariance", 60.0, positive_invariance);
  r.criterion(5, "slow time-scale scaling", 120.0, slow_scaling);
  r.criterion(6, "corridor behavior", 30.0, corridor_behavior);
  r.criterion(7, "regime map", 30.0, regime_map);
  r.criterion(8, "asymmetric transients", 10.0, asymmetric_transients);
  r.criterion(9, "manifest reproducibility", 120.0, reproducibility);
  std::printf("acceptance: %d failed, %d expected failures\n", r.failures(), r.xfailures());
  return r.failures() == 0 ? 0 : 1;
}
