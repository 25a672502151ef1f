#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace hetfuse {

enum class EngineKind : uint8_t { Landmark, Odometry };

const char* to_string(EngineKind e);
EngineKind engine_kind_from_string(const std::string& s);

/// One robot: engine choice, scripted waypoint path, sensor noise and
/// ranges, tracked target ids, and optional absolute-fix schedule.
struct RobotSpec {
  int id = 0;
  EngineKind engine = EngineKind::Landmark;
  std::vector<Eigen::Vector2d> path;  // waypoints; first is the nominal start
  double speed = 1.0;                 // meters per step (along the path)
  Eigen::Vector3d pose_prior_sigma = Eigen::Vector3d(0.05, 0.05, 0.02);
  Eigen::Vector3d odometry_sigma = Eigen::Vector3d(0.05, 0.05, 0.01);
  double landmark_obs_sigma = 0.3;
  double sensor_range = 12.0;     // landmark visibility
  double detection_range = 8.0;   // target visibility
  double measurement_sigma = 0.5; // relative position noise (R = sigma^2 I)
  std::set<int> targets;          // N^i_t
  std::vector<int> fix_steps;     // odometry engine: scheduled absolute fixes
  double fix_sigma = 0.2;
};

struct TargetInputPhase {
  int from = 0;  // applied to transitions k -> k+1 with from <= k < to
  int to = 0;
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
};

struct TargetSpec {
  int id = 0;
  Eigen::Vector4d prior_mean = Eigen::Vector4d::Zero();  // [X, Xdot, Y, Ydot]
  Eigen::Vector4d prior_sigma = Eigen::Vector4d(1.0, 0.5, 1.0, 0.5);
  std::vector<TargetInputPhase> input_script;

  Eigen::Vector2d input_at(int k) const;
};

struct EdgeSpec {
  int a = 0;
  int b = 1;
  int period = 1;  // exchange at steps k with k % period == 0
};

struct ScenarioConfig {
  int schema_version = 1;
  std::string name = "scenario";
  double dt = 1.0;
  int horizon = 50;
  uint64_t seed = 1;
  double world_process_noise = 0.08;      // actual target process noise
  double estimator_process_noise = 0.08;  // what the trackers assume
  bool known_input = false;               // do trackers know u?
  bool exact_mode = true;                 // reject non-tree topologies
  double drop_prob = 0.0;                 // per-exchange drop probability
  std::vector<RobotSpec> robots;
  std::vector<TargetSpec> targets;
  std::vector<Eigen::Vector2d> landmarks;
  std::vector<EdgeSpec> edges;

  /// Throws ConfigError on malformed scenarios: ids not dense from 0,
  /// empty paths, non-SPD sigmas, edges without common targets, cycles in
  /// exact mode.
  void validate() const;

  std::vector<int> neighbors_of(int robot) const;
  std::set<int> common_targets(int a, int b) const;

  nlohmann::json to_json() const;
  static ScenarioConfig from_json(const nlohmann::json& j);
  static ScenarioConfig load(const std::string& path);
  void save(const std::string& path) const;
};

/// Named desk-scale scenarios used by the CLI and the acceptance suite.
/// Throws ConfigError for unknown names.
ScenarioConfig builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

}  // namespace hetfuse
