#include "experiment.hpp"

#include <chrono>
#include <ctime>

#include "lvc/error.hpp"

#ifndef LVC_VERSION
#define LVC_VERSION "0.0.0"
#endif

namespace lvc::cli {

using nlohmann::json;

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Map: return "map";
    case Command::Scaling: return "scaling";
    case Command::Corridor: return "corridor";
  }
  return "unknown";
}

std::optional<Command> command_from_string(const std::string& s) {
  for (Command c : {Command::Simulate, Command::Map, Command::Scaling, Command::Corridor}) {
    if (s == to_string(c)) {
      return c;
    }
  }
  return std::nullopt;
}

std::vector<State> default_corridor_initial_conditions() {
  return {{0.2, 0.8}, {0.8, 0.2}, {0.5, 0.1}};
}

std::string artifact_version() { return LVC_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return j.at(key).get<double>();
}

json command_options(const Experiment& e) {
  switch (e.command) {
    case Command::Simulate:
      return {{"delta", e.simulate.delta},
              {"n_output", e.simulate.n_output},
              {"n_samples", e.simulate.n_samples}};
    case Command::Map:
      return {{"n", e.map.n}, {"contour_points", e.map.contour_points}};
    case Command::Scaling:
      return {{"etas", e.scaling.etas},
              {"delta", e.scaling.delta},
              {"anchor_a12", optional_number(e.scaling.anchor_a12)},
              {"offset", optional_number(e.scaling.offset)},
              {"horizon_factor", e.scaling.horizon_factor}};
    case Command::Corridor:
      return {{"n_samples", e.corridor.n_samples},
              {"synthetic_equilibrium", e.corridor.synthetic_equilibrium}};
  }
  return json::object();
}

}  // namespace

json to_json(const RunManifest& m) {
  const Experiment& e = m.experiment;
  json ics = json::array();
  for (const auto& x : e.initial_conditions) {
    ics.push_back({x.L, x.S});
  }
  return {
      {"artifact_version", m.artifact_version},
      {"timestamp", m.timestamp},
      {"subcommand", to_string(e.command)},
      {"params", {{"a12", e.params.a12}, {"a21", e.params.a21}, {"rho", e.params.rho}}},
      {"solver",
       {{"rel_tol", e.solver.rel_tol},
        {"abs_tol", e.solver.abs_tol},
        {"t_max", e.solver.t_max},
        {"initial_step", optional_number(e.solver.initial_step)},
        {"max_step", optional_number(e.solver.max_step)},
        {"invariance_slack", e.solver.invariance_slack}}},
      {"thresholds",
       {{"eps_balance", e.thresholds.eps_balance},
        {"gamma_capacity", e.thresholds.gamma_capacity}}},
      {"initial_conditions", ics},
      {"initial_conditions_source", e.initial_conditions_source},
      {"options", command_options(e)},
  };
}

RunManifest manifest_from_json(const json& j) {
  try {
    RunManifest m;
    m.artifact_version = j.at("artifact_version").get<std::string>();
    m.timestamp = j.value("timestamp", std::string{});
    Experiment& e = m.experiment;
    const auto cmd = command_from_string(j.at("subcommand").get<std::string>());
    if (!cmd) {
      throw Error(ErrorKind::InvalidArgument, "manifest names an unknown subcommand");
    }
    e.command = *cmd;
    const json& p = j.at("params");
    e.params = Params{p.at("a12").get<double>(), p.at("a21").get<double>(), p.at("rho").get<double>()};
    const json& s = j.at("solver");
    e.solver.rel_tol = s.at("rel_tol").get<double>();
    e.solver.abs_tol = s.at("abs_tol").get<double>();
    e.solver.t_max = s.at("t_max").get<double>();
    e.solver.initial_step = read_optional(s, "initial_step");
    e.solver.max_step = read_optional(s, "max_step");
    e.solver.invariance_slack = s.at("invariance_slack").get<double>();
    const json& th = j.at("thresholds");
    e.thresholds.eps_balance = th.at("eps_balance").get<double>();
    e.thresholds.gamma_capacity = th.at("gamma_capacity").get<double>();
    for (const auto& ic : j.at("initial_conditions")) {
      e.initial_conditions.push_back(State{ic.at(0).get<double>(), ic.at(1).get<double>()});
    }
    e.initial_conditions_source = j.at("initial_conditions_source").get<std::string>();
    const json& o = j.at("options");
    switch (e.command) {
      case Command::Simulate:
        e.simulate.delta = o.at("delta").get<double>();
        e.simulate.n_output = o.at("n_output").get<std::size_t>();
        e.simulate.n_samples = o.at("n_samples").get<std::size_t>();
        break;
      case Command::Map:
        e.map.n = o.at("n").get<std::size_t>();
        e.map.contour_points = o.at("contour_points").get<std::size_t>();
        break;
      case Command::Scaling:
        e.scaling.etas = o.at("etas").get<std::vector<double>>();
        e.scaling.delta = o.at("delta").get<double>();
        e.scaling.anchor_a12 = read_optional(o, "anchor_a12");
        e.scaling.offset = read_optional(o, "offset");
        e.scaling.horizon_factor = o.at("horizon_factor").get<double>();
        break;
      case Command::Corridor:
        e.corridor.n_samples = o.at("n_samples").get<std::size_t>();
        e.corridor.synthetic_equilibrium = o.at("synthetic_equilibrium").get<bool>();
        break;
    }
    return m;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed manifest: ") + ex.what());
  }
}

}  // namespace lvc::cli
