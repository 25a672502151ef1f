#pragma once

#include <map>
#include <optional>
#include <random>
#include <vector>

#include "hetfuse/models.hpp"
#include "hetfuse/scenario.hpp"

namespace hetfuse {

/// Everything one robot senses at one step.
struct RobotStepData {
  OdometryReading odo;
  std::vector<LandmarkSighting> sightings;
  std::optional<PoseFix> fix;
  std::vector<RelativePositionMeasurement> measurements;
};

/// Ground truth plus the full per-robot sensing record of one simulated
/// run. Decentralized agents and the centralized oracle consume the same
/// trace, so differences between them are attributable solely to fusion.
struct WorldTrace {
  uint64_t seed = 0;
  int horizon = 0;
  // truth[k], k = 0..horizon
  std::vector<std::vector<Eigen::Vector4d>> target_truth;
  std::vector<std::vector<Eigen::Vector3d>> robot_truth;
  // inputs[k][t] = u applied on the transition k-1 -> k, k = 1..horizon
  std::vector<std::vector<Eigen::Vector2d>> target_inputs;
  // sensed[k][r], k = 1..horizon
  std::vector<std::vector<RobotStepData>> sensed;

  const RobotStepData& at(int k, int robot) const { return sensed[k][robot]; }
};

/// Ground-truth world: scripted robot motion, Eq.-style target kinematics
/// with sampled process noise, range-gated noisy sensing. Deterministic
/// under (config, seed).
class WorldSim {
 public:
  explicit WorldSim(const ScenarioConfig& config, uint64_t seed);

  /// Advances truth from step k-1 to k and draws every robot's sensing.
  void step_world(int k);

  /// Sensing record of `robot` at step k (must have been simulated).
  const RobotStepData& observe(int robot, int k) const;

  const WorldTrace& trace() const { return trace_; }
  int current_step() const { return step_; }

 private:
  Eigen::Vector2d gaussian2(const Eigen::Vector2d& sigma);
  Eigen::Vector3d gaussian3(const Eigen::Vector3d& sigma);
  Eigen::Vector4d gaussian4(const Eigen::Vector4d& sigma);

  const ScenarioConfig config_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> unit_;
  int step_ = 0;
  std::vector<std::vector<Eigen::Vector3d>> nominal_poses_;  // [robot][k]
  WorldTrace trace_;
};

/// Runs the world over the full horizon and returns the trace.
WorldTrace simulate_world(const ScenarioConfig& config, uint64_t seed);

}  // namespace hetfuse
