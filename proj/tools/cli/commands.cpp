#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "output.hpp"
#include "svg.hpp"

namespace lvc::cli {

using nlohmann::json;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidState:
    case ErrorKind::NoInteriorEquilibrium:
      return kExitUsage;
    case ErrorKind::DegenerateGap:
      return kExitDegenerateGap;
    case ErrorKind::HorizonExceeded:
      return kExitHorizon;
    case ErrorKind::ConvergenceReExit:
    case ErrorKind::StepUnderflow:
    case ErrorKind::InvarianceBreach:
      return kExitSolver;
    case ErrorKind::OutOfRange:
    case ErrorKind::Consistency:
      return kExitInternal;
  }
  return kExitInternal;
}

namespace {

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); }

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string path_for(const OutputSpec& out, const std::string& suffix) {
  return out.prefix + "_" + suffix;
}

// Files are staged in memory and written once all computation has finished.
struct Payload {
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string path, std::string content) {
    files.emplace_back(std::move(path), std::move(content));
  }
};

const char* ordering_label(const State& eq) {
  if (eq.L > eq.S) return "state-leaning";
  if (eq.S > eq.L) return "society-leaning";
  return "balanced";
}

json intervals_json(const std::vector<CorridorInterval>& ivs) {
  json arr = json::array();
  for (const auto& iv : ivs) {
    arr.push_back({iv.entry, iv.exit});
  }
  return arr;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const Experiment& e, const OutputSpec& out, std::ostream& diag, Payload& pay) {
  const Params& p = e.params;
  const State x0 = e.initial_conditions.front();
  const IntegrationResult run = integrate(p, x0, e.solver);
  const Trajectory& traj = run.trajectory;
  const auto eq = interior_equilibrium(p);

  std::optional<CorridorIndicator> gamma;
  if (!eq) {
    diag << "warning: no interior equilibrium (requires a12 < 1 and a21 < 1); gamma column omitted\n";
  } else {
    try {
      gamma.emplace(p);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::DegenerateGap) throw;
      diag << "warning: " << err.what() << "; gamma column omitted\n";
    }
  }

  const SimulateOptions& so = e.simulate;
  CsvWriter csv(gamma ? std::vector<std::string>{"tau", "L", "S", "gamma"}
                      : std::vector<std::string>{"tau", "L", "S"});
  std::vector<double> taus(so.n_output), Ls(so.n_output), Ss(so.n_output);
  const double t0 = traj.t_begin();
  const double t1 = traj.t_end();
  for (std::size_t k = 0; k < so.n_output; ++k) {
    const double tau =
        k + 1 == so.n_output ? t1 : t0 + (t1 - t0) * static_cast<double>(k) / (so.n_output - 1);
    const State x = traj.at(tau);
    taus[k] = tau;
    Ls[k] = x.L;
    Ss[k] = x.S;
    if (gamma) {
      csv.row({tau, x.L, x.S, (*gamma)(x)});
    } else {
      csv.row({tau, x.L, x.S});
    }
  }

  json summary = {
      {"subcommand", "simulate"},
      {"a12", p.a12},
      {"a21", p.a21},
      {"rho", p.rho},
      {"eta", p.eta()},
      {"l0", x0.L},
      {"s0", x0.S},
      {"initial_conditions_source", e.initial_conditions_source},
      {"t_max", e.solver.t_max},
      {"rel_tol", e.solver.rel_tol},
      {"abs_tol", e.solver.abs_tol},
      {"final_tau", t1},
      {"final_L", traj.final_state().L},
      {"final_S", traj.final_state().S},
      {"accepted_steps", traj.stats().accepted_steps},
      {"rejected_steps", traj.stats().rejected_steps},
      {"field_evaluations", traj.stats().field_evaluations},
      {"has_interior_equilibrium", eq.has_value()},
      {"gamma_available", gamma.has_value()},
      {"delta", so.delta},
  };
  std::vector<CorridorInterval> intervals;
  if (eq) {
    const SpectralSummary spec = interior_spectrum(p);
    summary["Lstar"] = eq->L;
    summary["Sstar"] = eq->S;
    summary["equilibrium_ordering"] = ordering_label(*eq);
    summary["interior_stability"] = to_string(classify(eigenvalues(jacobian(p, *eq))));
    summary["trace"] = spec.trace;
    summary["det"] = spec.det;
    summary["lambda_fast"] = spec.lambda_fast;
    summary["lambda_slow"] = spec.lambda_slow;
    summary["slow_estimate"] = spec.slow_estimate;
    summary["timescale_ratio"] = spec.timescale_ratio;
    summary["gap_epsilon"] = std::abs(eq->L - eq->S);
    try {
      const ConvergenceResult conv = convergence_time(p, x0, so.delta, e.solver);
      summary["t_conv"] = conv.t_conv;
      summary["t_conv_status"] = "ok";
    } catch (const HorizonExceededError& err) {
      diag << "warning: " << err.what() << "\n";
      summary["t_conv"] = nullptr;
      summary["t_conv_status"] = "horizon_exceeded";
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::ConvergenceReExit) throw;
      diag << "warning: " << err.what() << "\n";
      summary["t_conv"] = nullptr;
      summary["t_conv_status"] = "re_exit";
    }
  } else {
    for (const char* k : {"Lstar", "Sstar", "equilibrium_ordering", "interior_stability", "trace",
                          "det", "lambda_fast", "lambda_slow", "slow_estimate", "timescale_ratio",
                          "gap_epsilon", "t_conv"}) {
      summary[k] = nullptr;
    }
    summary["t_conv_status"] = "unavailable";
  }
  if (gamma) {
    const CorridorSeries cs = corridor_analysis(p, traj, so.n_samples);
    intervals = cs.intervals;
    summary["corridor_intervals"] = intervals_json(cs.intervals);
    summary["dwell_total"] = cs.dwell_total;
    summary["dwell_fraction"] = cs.dwell_fraction;
  } else {
    summary["corridor_intervals"] = json::array();
    summary["dwell_total"] = nullptr;
    summary["dwell_fraction"] = nullptr;
  }

  pay.add(path_for(out, "timeseries.csv"), csv.str());
  pay.add(path_for(out, "summary.json"), dump_json(summary));

  if (out.svg) {
    SvgChart chart(t0, t1, 0.0, 1.0,
                   "a12=" + format_number(p.a12) + " a21=" + format_number(p.a21) +
                       " rho=" + format_number(p.rho),
                   "tau", "level");
    for (const auto& iv : intervals) {
      chart.band(iv.entry, iv.exit, "#9ecae1", 0.5);
    }
    chart.polyline(taus, Ls, "#d62728");
    chart.polyline(taus, Ss, "#1f77b4");
    chart.legend("L(tau)", "#d62728");
    chart.legend("S(tau)", "#1f77b4");
    if (!intervals.empty()) chart.legend("gamma <= 1", "#9ecae1");
    pay.add(path_for(out, "timeseries.svg"), chart.render());
  }
  return kExitOk;
}

// --------------------------------------------------------------------- map

const char* class_color(RegimeClass c) {
  switch (c) {
    case RegimeClass::StateLeaning: return "#e6550d";
    case RegimeClass::SocietyLeaning: return "#31a354";
    case RegimeClass::CorridorCore: return "#756bb1";
    case RegimeClass::BalancedLowCapacity: return "#fdd0a2";
  }
  return "#000000";
}

int run_map(const Experiment& e, const OutputSpec& out, std::ostream&, Payload& pay) {
  const RegimeGrid grid =
      sweep(e.map.n, e.thresholds, e.params.rho, e.map.contour_points, /*workers=*/0);

  CsvWriter raster({"a12", "a21", "Lstar", "Sstar", "eta", "class"});
  for (const auto& c : grid.cells) {
    raster.row_with_int({c.a12, c.a21, c.L_star, c.S_star, c.eta}, static_cast<int>(c.cls));
  }

  const std::vector<std::pair<const char*, const Polyline*>> curves = {
      {"symmetry", &grid.symmetry},
      {"gap_upper", &grid.gap.upper},
      {"gap_lower", &grid.gap.lower},
      {"capacity_L", &grid.capacity_L},
      {"capacity_S", &grid.capacity_S},
  };
  CsvWriter contours({"curve", "a12", "a21"});
  json curve_legend = json::object();
  for (std::size_t id = 0; id < curves.size(); ++id) {
    curve_legend[std::to_string(id)] = curves[id].first;
    const Polyline& pl = *curves[id].second;
    for (std::size_t k = 0; k < pl.size(); ++k) {
      contours.row_ints_first({static_cast<long long>(id)}, {pl.a12[k], pl.a21[k]});
    }
  }

  const auto counts = grid.class_counts();
  json class_legend = json::object();
  json class_counts = json::object();
  for (int c = 0; c < kRegimeClassCount; ++c) {
    class_legend[std::to_string(c)] = to_string(static_cast<RegimeClass>(c));
    class_counts[to_string(static_cast<RegimeClass>(c))] = counts[static_cast<std::size_t>(c)];
  }
  const json summary = {
      {"subcommand", "map"},
      {"n", grid.n},
      {"cells", grid.cells.size()},
      {"rho", grid.rho},
      {"eps_balance", grid.thresholds.eps_balance},
      {"gamma_capacity", grid.thresholds.gamma_capacity},
      {"thresholds_source", "artifact defaults unless overridden"},
      {"margin", 0.5 / static_cast<double>(grid.n)},
      {"class_legend", class_legend},
      {"class_counts", class_counts},
      {"curve_legend", curve_legend},
      {"contour_points", e.map.contour_points},
  };

  pay.add(path_for(out, "raster.csv"), raster.str());
  pay.add(path_for(out, "contours.csv"), contours.str());
  pay.add(path_for(out, "summary.json"), dump_json(summary));

  if (out.svg) {
    SvgChart chart(0.0, 1.0, 0.0, 1.0, "interior-equilibrium regime map", "a12", "a21");
    const double w = 1.0 / static_cast<double>(grid.n);
    // Run-length encode each a12 column along a21.
    for (std::size_t i = 0; i < grid.n; ++i) {
      std::size_t j = 0;
      while (j < grid.n) {
        const RegimeClass cls = grid.cell(i, j).cls;
        std::size_t k = j;
        while (k < grid.n && grid.cell(i, k).cls == cls) ++k;
        chart.rect(i * w, j * w, (i + 1) * w, k * w, class_color(cls));
        j = k;
      }
    }
    for (const auto& [name, pl] : curves) {
      chart.polyline(pl->a12, pl->a21, "black", 1.0);
    }
    for (int c = 0; c < kRegimeClassCount; ++c) {
      chart.legend(to_string(static_cast<RegimeClass>(c)), class_color(static_cast<RegimeClass>(c)));
    }
    pay.add(path_for(out, "raster.svg"), chart.render());
  }
  return kExitOk;
}

// ----------------------------------------------------------------- scaling

enum class RowStatus : int { Ok = 0, HorizonExceeded = 1, ReExit = 2, SolverFailure = 3 };

struct ScalingRow {
  double eta = 0.0;
  Params params;
  double lambda_slow = 0.0;
  double slow_estimate = 0.0;
  double predicted = 0.0;
  double horizon = 0.0;
  double t_conv = std::numeric_limits<double>::quiet_NaN();
  RowStatus status = RowStatus::Ok;
  std::string message;
};

Params family_member(const ScalingOptions& so, double eta, double rho) {
  if (so.anchor_a12) return near_critical_family(eta, *so.anchor_a12, rho);
  if (so.offset) return near_critical_family(eta, 1.0 - *so.offset * eta, rho);
  return symmetric_near_critical(eta, rho);
}

int run_scaling(const Experiment& e, const OutputSpec& out, std::ostream& diag, Payload& pay) {
  const ScalingOptions& so = e.scaling;
  const State x0 = e.initial_conditions.front();

  // Build every member first so a family-constraint violation is a usage error.
  std::vector<ScalingRow> rows(so.etas.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ScalingRow& r = rows[i];
    r.eta = so.etas[i];
    r.params = family_member(so, r.eta, e.params.rho);
    const SpectralSummary spec = interior_spectrum(r.params);
    const State eq = *interior_equilibrium(r.params);
    r.lambda_slow = spec.lambda_slow;
    r.slow_estimate = spec.slow_estimate;
    const double d0 = distance_to_equilibrium(x0, eq);
    r.predicted = std::log(std::max(d0, so.delta) / so.delta) / std::abs(spec.lambda_slow);
    r.horizon = std::max(e.solver.t_max, so.horizon_factor / std::abs(spec.lambda_slow));
  }

  auto measure = [&](ScalingRow& r) {
    SolverConfig cfg = e.solver;
    cfg.t_max = r.horizon;
    try {
      r.t_conv = convergence_time(r.params, x0, so.delta, cfg).t_conv;
    } catch (const Error& err) {
      r.message = err.what();
      r.status = err.kind() == ErrorKind::HorizonExceeded   ? RowStatus::HorizonExceeded
                 : err.kind() == ErrorKind::ConvergenceReExit ? RowStatus::ReExit
                                                              : RowStatus::SolverFailure;
    }
  };
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers <= 1 || rows.size() <= 1) {
    for (auto& r : rows) measure(r);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < rows.size(); i += workers) measure(rows[i]);
      });
    }
  }

  CsvWriter csv({"eta", "a12", "a21", "lambda_slow", "slow_estimate", "t_conv", "predicted",
                 "horizon", "status"});
  std::vector<double> xs, ys;
  std::size_t failed = 0;
  for (const auto& r : rows) {
    csv.row_with_int({r.eta, r.params.a12, r.params.a21, r.lambda_slow, r.slow_estimate, r.t_conv,
                      r.predicted, r.horizon},
                     static_cast<int>(r.status));
    if (r.status == RowStatus::Ok && r.t_conv > 0.0) {
      xs.push_back(std::log(r.eta));
      ys.push_back(std::log(r.t_conv));
    } else if (r.status != RowStatus::Ok) {
      ++failed;
      diag << "warning: eta=" << r.eta << ": " << r.message << "\n";
    }
  }

  json summary = {
      {"subcommand", "scaling"},
      {"rho", e.params.rho},
      {"delta", so.delta},
      {"l0", x0.L},
      {"s0", x0.S},
      {"family", so.anchor_a12 ? "fixed-a12" : (so.offset ? "offset" : "symmetric")},
      {"anchor_a12", nullable(so.anchor_a12)},
      {"offset", nullable(so.offset)},
      {"rows", rows.size()},
      {"rows_used", xs.size()},
      {"rows_failed", failed},
  };
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double res = ys[i] - (intercept + slope * xs[i]);
      ss += res * res;
    }
    summary["slope"] = slope;
    summary["intercept"] = intercept;
    summary["residual_rms"] = std::sqrt(ss / n);
  }

  pay.add(path_for(out, "scaling.csv"), csv.str());
  pay.add(path_for(out, "summary.json"), dump_json(summary));
  if (failed > 0 && xs.size() < 3) {
    diag << "error: only " << xs.size() << " of " << rows.size() << " scaling runs converged\n";
    return kExitHorizon;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- corridor

int run_corridor(const Experiment& e, const OutputSpec& out, std::ostream&, Payload& pay) {
  const Params& p = e.params;
  const CorridorIndicator gamma(p);  // degenerate gap is fatal here
  const CorridorOptions& co = e.corridor;

  std::vector<CorridorSeries> series;
  for (const State& x0 : e.initial_conditions) {
    if (co.synthetic_equilibrium) {
      series.push_back(corridor_analysis(
          p, Trajectory::constant(p, x0, 0.0, e.solver.t_max), co.n_samples));
    } else {
      series.push_back(corridor_analysis(p, integrate(p, x0, e.solver).trajectory, co.n_samples));
    }
  }

  CsvWriter csv({"run", "entry", "exit", "length"});
  json l0 = json::array(), s0 = json::array(), dwell = json::array(), frac = json::array(),
       count = json::array();
  for (std::size_t r = 0; r < series.size(); ++r) {
    for (const auto& iv : series[r].intervals) {
      csv.row_ints_first({static_cast<long long>(r)}, {iv.entry, iv.exit, iv.length()});
    }
    l0.push_back(e.initial_conditions[r].L);
    s0.push_back(e.initial_conditions[r].S);
    dwell.push_back(series[r].dwell_total);
    frac.push_back(series[r].dwell_fraction);
    count.push_back(series[r].intervals.size());
  }
  const json summary = {
      {"subcommand", "corridor"},
      {"a12", p.a12},
      {"a21", p.a21},
      {"rho", p.rho},
      {"gap_epsilon", gamma.gap()},
      {"gamma_resolution", kDefaultGammaResolution},
      {"horizon", series.front().horizon},
      {"n_samples", co.n_samples},
      {"initial_conditions_source", e.initial_conditions_source},
      {"l0", l0},
      {"s0", s0},
      {"dwell_total", dwell},
      {"dwell_fraction", frac},
      {"interval_count", count},
  };
  pay.add(path_for(out, "intervals.csv"), csv.str());
  pay.add(path_for(out, "dwell.json"), dump_json(summary));
  return kExitOk;
}

// ------------------------------------------------------------------ parsing

struct CommonFlags {
  double a12 = 0.48;
  double a21 = 0.55;
  double rho = 1.0;
  double l0 = 0.0;
  double s0 = 0.0;
  double t_max = 200.0;
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  double max_step = 0.0;
  double initial_step = 0.0;
  std::string out = "lvcorridor";
  bool svg = false;
  std::string manifest;

  CLI::Option* o_a12 = nullptr;
  CLI::Option* o_a21 = nullptr;
  CLI::Option* o_l0 = nullptr;
  CLI::Option* o_s0 = nullptr;
  CLI::Option* o_max_step = nullptr;
  CLI::Option* o_initial_step = nullptr;
  CLI::Option* o_manifest = nullptr;
  std::vector<CLI::Option*> replayable;  // must not be combined with --manifest
};

void add_common(CLI::App* sub, CommonFlags& f) {
  auto track = [&](CLI::Option* o) {
    f.replayable.push_back(o);
    return o;
  };
  f.o_a12 = track(sub->add_option("--a12", f.a12, "interaction coefficient a12")->capture_default_str());
  f.o_a21 = track(sub->add_option("--a21", f.a21, "interaction coefficient a21")->capture_default_str());
  track(sub->add_option("--rho", f.rho, "relative adjustment rate rho")->capture_default_str());
  f.o_l0 = track(sub->add_option("--l0", f.l0, "initial L"));
  f.o_s0 = track(sub->add_option("--s0", f.s0, "initial S"));
  track(sub->add_option("--tmax", f.t_max, "integration horizon")->capture_default_str());
  track(sub->add_option("--rel-tol", f.rel_tol, "relative tolerance")->capture_default_str());
  track(sub->add_option("--abs-tol", f.abs_tol, "absolute tolerance")->capture_default_str());
  f.o_max_step = track(sub->add_option("--max-step", f.max_step, "step cap (default tmax/10)"));
  f.o_initial_step =
      track(sub->add_option("--initial-step", f.initial_step, "first step (default automatic)"));
  sub->add_option("--out", f.out, "output path prefix")->capture_default_str();
  sub->add_flag("--svg", f.svg, "also write an SVG figure");
  f.o_manifest = sub->add_option("--manifest", f.manifest, "replay a previously emitted manifest");
}

Experiment experiment_from_flags(Command cmd, const CommonFlags& f) {
  Experiment e;
  e.command = cmd;
  e.params = Params{f.a12, f.a21, f.rho};
  e.solver.t_max = f.t_max;
  e.solver.rel_tol = f.rel_tol;
  e.solver.abs_tol = f.abs_tol;
  if (f.o_max_step->count()) e.solver.max_step = f.max_step;
  if (f.o_initial_step->count()) e.solver.initial_step = f.initial_step;
  const bool has_l0 = f.o_l0->count() > 0;
  const bool has_s0 = f.o_s0->count() > 0;
  if (has_l0 != has_s0) {
    usage("--l0 and --s0 must be given together");
  }
  if (has_l0) {
    e.initial_conditions = {State{f.l0, f.s0}};
    e.initial_conditions_source = kSourceUser;
  }
  return e;
}

void check_unit_square(const State& x, const char* what) {
  if (!x.finite() || !x.in_domain(0.0)) {
    std::ostringstream os;
    os << what << " (" << x.L << ", " << x.S << ") must lie in [0, 1]^2";
    usage(os.str());
  }
}

}  // namespace

void validate(const Experiment& e) {
  validate(e.params);
  validate(e.solver);
  for (const auto& x : e.initial_conditions) {
    check_unit_square(x, "initial condition");
  }
  switch (e.command) {
    case Command::Simulate:
      if (e.initial_conditions.size() != 1) usage("simulate takes exactly one initial condition");
      if (!(e.simulate.delta > 0.0)) usage("--delta must be > 0");
      if (e.simulate.n_output < 2) usage("--n-output must be >= 2");
      if (e.simulate.n_samples < 2) usage("--n-samples must be >= 2");
      break;
    case Command::Map:
      if (e.map.n < 2) usage("--n must be >= 2");
      validate(e.thresholds);
      break;
    case Command::Scaling: {
      const auto& so = e.scaling;
      if (e.initial_conditions.size() != 1) usage("scaling takes exactly one initial condition");
      if (so.etas.empty()) usage("--etas must list at least one value");
      for (std::size_t i = 0; i < so.etas.size(); ++i) {
        if (!(so.etas[i] > 0.0 && so.etas[i] < 1.0)) usage("every eta must lie in (0, 1)");
        if (i > 0 && !(so.etas[i] < so.etas[i - 1])) usage("--etas must be strictly decreasing");
      }
      if (!(so.delta > 0.0)) usage("--delta must be > 0");
      if (so.anchor_a12 && so.offset) usage("--a12 and --offset are mutually exclusive");
      if (so.offset && !(*so.offset > 0.0 && *so.offset < 1.0)) usage("--offset must lie in (0, 1)");
      if (!(so.horizon_factor > 0.0)) usage("--horizon-factor must be > 0");
      break;
    }
    case Command::Corridor:
      if (e.initial_conditions.empty()) usage("corridor needs at least one initial condition");
      if (e.corridor.n_samples < 2) usage("--n-samples must be >= 2");
      break;
  }
}

int execute(const Experiment& e, const OutputSpec& out, std::ostream& diag) {
  try {
    validate(e);
    Payload pay;
    int status = kExitOk;
    switch (e.command) {
      case Command::Simulate: status = run_simulate(e, out, diag, pay); break;
      case Command::Map: status = run_map(e, out, diag, pay); break;
      case Command::Scaling: status = run_scaling(e, out, diag, pay); break;
      case Command::Corridor: status = run_corridor(e, out, diag, pay); break;
    }
    RunManifest manifest{artifact_version(), utc_timestamp(), e};
    pay.add(path_for(out, "manifest.json"), dump_json(to_json(manifest)));
    for (const auto& [path, content] : pay.files) {
      write_file(path, content);
      diag << "wrote " << path << "\n";
    }
    return status;
  } catch (const Error& err) {
    diag << "error (" << to_string(err.kind()) << "): " << err.what() << "\n";
    return exit_code_for(err.kind());
  } catch (const IoError& err) {
    diag << "error (io): " << err.what() << "\n";
    return kExitIo;
  }
}

int run(const std::vector<std::string>& args, std::ostream& diag) {
  CLI::App app{"Near-critical competitive Lotka-Volterra laboratory", "lvcorridor"};
  app.require_subcommand(1);

  CommonFlags f_sim, f_map, f_scal, f_corr;
  Experiment d;  // defaults

  CLI::App* sim = app.add_subcommand("simulate", "integrate one trajectory; time series + summary");
  add_common(sim, f_sim);
  double sim_delta = d.simulate.delta;
  std::size_t sim_n_output = d.simulate.n_output, sim_n_samples = d.simulate.n_samples;
  f_sim.replayable.push_back(
      sim->add_option("--delta", sim_delta, "convergence radius")->capture_default_str());
  f_sim.replayable.push_back(
      sim->add_option("--n-output", sim_n_output, "time-series rows")->capture_default_str());
  f_sim.replayable.push_back(
      sim->add_option("--n-samples", sim_n_samples, "corridor samples")->capture_default_str());

  CLI::App* map = app.add_subcommand("map", "interior-equilibrium regime map");
  add_common(map, f_map);
  std::size_t map_n = d.map.n, map_points = d.map.contour_points;
  double eps_balance = d.thresholds.eps_balance, gamma_capacity = d.thresholds.gamma_capacity;
  f_map.replayable.push_back(map->add_option("--n", map_n, "cells per axis")->capture_default_str());
  f_map.replayable.push_back(
      map->add_option("--contour-points", map_points, "samples per contour")->capture_default_str());
  f_map.replayable.push_back(
      map->add_option("--eps-balance", eps_balance, "balanced-band threshold")->capture_default_str());
  f_map.replayable.push_back(map->add_option("--gamma-capacity", gamma_capacity,
                                             "capacity threshold")
                                 ->capture_default_str());

  CLI::App* scal = app.add_subcommand("scaling", "convergence time versus eta");
  add_common(scal, f_scal);
  std::vector<double> etas = d.scaling.etas;
  double scal_delta = d.scaling.delta, offset = 0.0, horizon_factor = d.scaling.horizon_factor;
  f_scal.replayable.push_back(
      scal->add_option("--etas", etas, "strictly decreasing eta list")->delimiter(','));
  f_scal.replayable.push_back(
      scal->add_option("--delta", scal_delta, "convergence radius")->capture_default_str());
  CLI::Option* o_offset =
      scal->add_option("--offset", offset, "family a12 = 1 - offset * eta (default symmetric)");
  f_scal.replayable.push_back(o_offset);
  f_scal.replayable.push_back(scal->add_option("--horizon-factor", horizon_factor,
                                               "horizon = max(tmax, factor/|lambda_slow|)")
                                  ->capture_default_str());

  CLI::App* corr = app.add_subcommand("corridor", "corridor dwell intervals");
  add_common(corr, f_corr);
  std::size_t corr_n = d.corridor.n_samples;
  bool synthetic = false;
  f_corr.replayable.push_back(
      corr->add_option("--n-samples", corr_n, "indicator samples")->capture_default_str());
  f_corr.replayable.push_back(corr->add_flag(
      "--synthetic-equilibrium", synthetic, "analyse a constant trajectory sitting at E*"));

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    diag << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    diag << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& err) {
    diag << "usage error: " << err.what() << "\n" << app.help();
    return kExitUsage;
  }

  Command cmd = Command::Simulate;
  CommonFlags* f = &f_sim;
  if (map->parsed()) {
    cmd = Command::Map;
    f = &f_map;
  } else if (scal->parsed()) {
    cmd = Command::Scaling;
    f = &f_scal;
  } else if (corr->parsed()) {
    cmd = Command::Corridor;
    f = &f_corr;
  }
  const OutputSpec out{f->out, f->svg};

  try {
    if (f->o_manifest->count()) {
      for (CLI::Option* o : f->replayable) {
        if (o->count()) {
          usage("--manifest cannot be combined with " + o->get_name());
        }
      }
      std::ifstream is(f->manifest);
      if (!is) usage("cannot read manifest " + f->manifest);
      json j;
      try {
        j = json::parse(is);
      } catch (const json::exception& ex) {
        usage(std::string("manifest is not valid JSON: ") + ex.what());
      }
      const RunManifest m = manifest_from_json(j);
      if (m.experiment.command != cmd) {
        usage(std::string("manifest was produced by '") + to_string(m.experiment.command) +
              "', not '" + to_string(cmd) + "'");
      }
      if (m.artifact_version != artifact_version()) {
        diag << "warning: manifest version " << m.artifact_version << " differs from "
             << artifact_version() << "\n";
      }
      return execute(m.experiment, out, diag);
    }

    Experiment e = experiment_from_flags(cmd, *f);
    switch (cmd) {
      case Command::Simulate:
        e.simulate = {sim_delta, sim_n_output, sim_n_samples};
        if (e.initial_conditions.empty()) {
          e.initial_conditions = {default_corridor_initial_conditions().front()};
          e.initial_conditions_source = kSourceDefaults;
        }
        break;
      case Command::Map:
        e.map = {map_n, map_points};
        e.thresholds = {eps_balance, gamma_capacity};
        break;
      case Command::Scaling:
        e.scaling.etas = etas;
        e.scaling.delta = scal_delta;
        e.scaling.horizon_factor = horizon_factor;
        if (f->o_a12->count()) e.scaling.anchor_a12 = f->a12;
        if (o_offset->count()) e.scaling.offset = offset;
        if (e.initial_conditions.empty()) {
          e.initial_conditions = {State{0.3, 0.6}};
          e.initial_conditions_source = kSourceDefaults;
        }
        break;
      case Command::Corridor:
        e.corridor = {corr_n, synthetic};
        if (synthetic) {
          if (!e.initial_conditions.empty()) {
            usage("--synthetic-equilibrium cannot be combined with --l0/--s0");
          }
          e.initial_conditions = {require_interior_equilibrium(e.params)};
          e.initial_conditions_source = kSourceSynthetic;
        } else if (e.initial_conditions.empty()) {
          e.initial_conditions = default_corridor_initial_conditions();
          e.initial_conditions_source = kSourceDefaults;
        }
        break;
    }
    return execute(e, out, diag);
  } catch (const Error& err) {
    diag << "error (" << to_string(err.kind()) << "): " << err.what() << "\n";
    return exit_code_for(err.kind());
  }
}

}  // namespace lvc::cli
