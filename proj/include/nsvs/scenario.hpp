#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "nsvs/camera.hpp"
#include "nsvs/controller.hpp"
#include "nsvs/simulator.hpp"

namespace nsvs {

inline constexpr int kScenarioSchemaVersion = 1;

/// Initial parameter estimate. `random` scales every true component by a
/// log-uniform factor drawn from `range` (signs preserved); `explicit_values`
/// uses the given vectors; `truth` starts at the true parameters.
struct ThetaInit {
  enum class Mode { random, explicit_values, truth };
  Mode mode = Mode::random;
  std::array<double, 2> range{0.5, 2.0};
  Vec4 theta_z = Vec4::Zero();
  VecX theta_k;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  RobotModel robot = ur5_preset();
  CameraModel camera = desk_camera_preset();
  VecX initial_q = ur5_home_pose();
  ParamLayout layout = ParamLayout::shared_depth_row;
  ThetaInit theta_init;
  ControllerConfig gains;
  TargetSpec target = SetpointTarget{};
  IntentSchedule intent;
  SimConfig sim;
  PixelNoise noise;
  double convergence_threshold = 5.0;  // px
};

/// Parses and validates a scenario document. Missing keys take defaults;
/// unknown keys and invalid values are reported together as a
/// ValidationError, each issue tagged with its config path.
Scenario scenario_from_json(const nlohmann::json& doc);

/// Reads `path` as a scenario file (JSON).
Scenario parse_scenario(const std::filesystem::path& path);

/// Resolves a CLI scenario argument: "task1" / "task2" name the built-in
/// presets, anything else is a path.
Scenario load_scenario(const std::string& name_or_path);

/// Fully materialized form of a scenario. Feeding it back to
/// scenario_from_json reproduces the scenario exactly.
nlohmann::json scenario_to_json(const Scenario& s);

/// Semantic checks beyond parsing: depth positivity over a joint-space probe
/// sweep, a nonsingular start, gain positivity. Throws ValidationError.
void validate_scenario(const Scenario& s);

/// Task 1: K_p = 2, c_d = 1, setpoint (720, 540), Euler at 30 Hz.
Scenario task1_preset();

/// Task 2: K_p = 5, c_d = 0.5, circle of radius 100 px at pi/15 rad/s, a mid-run
/// intent on joint 3, RK4 at 30 Hz.
Scenario task2_preset();

/// Initial estimate from the scenario's ThetaInit, seeded by sim.seed.
EstimatorState initial_estimate(const Scenario& s);

/// Simulator setup for the scenario.
SimSetup make_setup(const Scenario& s);

}  // namespace nsvs
