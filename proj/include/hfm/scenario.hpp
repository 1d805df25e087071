#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hfm/contact_sensor.hpp"
#include "hfm/hybrid_controller.hpp"
#include "hfm/kinematics.hpp"
#include "hfm/normal_estimator.hpp"
#include "hfm/surface.hpp"

namespace hfm {

struct Diagnostic {
  std::string key;  // empty for syntax errors
  int line = 0;     // 0 for command-line overrides
  std::string message;

  std::string str(std::string_view source = {}) const;
};

class ScenarioError : public Error {
 public:
  explicit ScenarioError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct ConfigEntry {
  std::string value;
  int line = 0;
};

/// Raw `key = value` entries of a scenario file, keyed by dotted path.
struct ConfigEntries {
  std::string source;  // file name for diagnostics
  std::map<std::string, ConfigEntry> entries;
};

/// Parses `key = value` lines; `#` starts a comment. Throws ScenarioError
/// listing every malformed or duplicated line.
ConfigEntries parse_config(std::string_view text, std::string source = {});

/// Applies `key=value`, replacing any existing entry.
void apply_override(ConfigEntries& config, std::string_view assignment);

struct Scenario {
  std::string name = "scenario";
  double duration = 20.0;  // s of hybrid-phase control
  double rate = 1000.0;    // Hz
  std::uint64_t seed = 1;

  RobotModel robot = default_robot();
  std::optional<JointVector> q0;
  JointVector q_seed;
  double start_height = 0.03;  // m above the first path point
  double start_tilt_deg = 0.0;
  Vec3 start_tilt_axis = Vec3::UnitY();

  SurfaceModel surface = Plane{};
  PathSpec path;
  ContactParams contact;

  EstimatorConfig estimator;
  bool estimator_enabled = true;
  ControllerConfig controller;

  double approach_timeout = 5.0;  // s
  double metrics_transient = 0.5; // s after contact excluded from averages

  Scenario();
};

/// Builds and validates a scenario. Throws ScenarioError with one diagnostic
/// per unknown key, malformed value or violated invariant.
Scenario build_scenario(const ConfigEntries& config);

/// Reads, overrides and builds. The scenario name defaults to the file stem.
Scenario load_scenario(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides = {});

/// Every key the scenario schema accepts, in documentation order.
const std::vector<std::string>& scenario_keys();

}  // namespace hfm
