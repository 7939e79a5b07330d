#pragma once

// Everything that determines a command's output. A RunManifest serializes an
// Experiment plus provenance (version, timestamp); replaying the manifest
// rebuilds the same Experiment and hence byte-identical payloads.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lvc/corridor.hpp"
#include "lvc/integrator.hpp"
#include "lvc/model.hpp"
#include "lvc/regime_map.hpp"

namespace lvc::cli {

enum class Command { Simulate, Map, Scaling, Corridor };

const char* to_string(Command c) noexcept;
std::optional<Command> command_from_string(const std::string& s);

struct SimulateOptions {
  double delta = 1e-3;
  std::size_t n_output = 2001;
  std::size_t n_samples = kDefaultCorridorSamples;
};

struct MapOptions {
  std::size_t n = kDefaultMapResolution;
  std::size_t contour_points = kDefaultContourPoints;
};

struct ScalingOptions {
  std::vector<double> etas{0.2, 0.1, 0.05, 0.025, 0.0125};
  double delta = 1e-3;
  std::optional<double> anchor_a12;  // fixed a12 for every eta
  std::optional<double> offset;      // a12 = 1 - offset * eta
  double horizon_factor = 25.0;      // horizon = max(t_max, factor / |lambda_slow|)
};

struct CorridorOptions {
  std::size_t n_samples = kDefaultCorridorSamples;
  bool synthetic_equilibrium = false;
};

inline constexpr const char* kSourceUser = "user";
inline constexpr const char* kSourceDefaults = "artifact defaults";
inline constexpr const char* kSourceSynthetic = "synthetic equilibrium";

struct Experiment {
  Command command = Command::Simulate;
  Params params{0.48, 0.55, 1.0};
  SolverConfig solver;
  MapThresholds thresholds;
  std::vector<State> initial_conditions;
  std::string initial_conditions_source = kSourceUser;
  SimulateOptions simulate;
  MapOptions map;
  ScalingOptions scaling;
  CorridorOptions corridor;
};

// Initial conditions used for the three-run corridor comparison when the user gives none.
std::vector<State> default_corridor_initial_conditions();

struct RunManifest {
  std::string artifact_version;
  std::string timestamp;
  Experiment experiment;
};

nlohmann::json to_json(const RunManifest& m);
// Throws lvc::Error(InvalidArgument) on a malformed manifest.
RunManifest manifest_from_json(const nlohmann::json& j);

std::string artifact_version();
std::string utc_timestamp();

}  // namespace lvc::cli
