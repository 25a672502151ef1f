#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "hetfuse/models.hpp"

namespace hetfuse {

/// Behavioral contract every local SLAM engine satisfies, whatever it runs
/// inside: advance one step, answer joint pose-marginal requests over a
/// set of timesteps, and accept pose factors back from the tracking
/// module. The robot agent and all fusion machinery work against this
/// interface only.
class SlamEngine {
 public:
  virtual ~SlamEngine() = default;

  virtual void advance(const OdometryReading& odo, const std::vector<LandmarkSighting>& sightings,
                       const std::optional<PoseFix>& fix, int k) = 0;

  /// Joint marginal over RobotPose dims at the requested timesteps (a
  /// single factor spanning all of them; dropping the cross-correlation
  /// would double-count under the channel filter). Origin PoseFromSlam.
  virtual Factor pose_marginal(const std::vector<int>& timesteps, uint32_t seq) = 0;

  /// Appends a PoseFromTracking factor to the engine graph; subsequent
  /// pose and map marginals reflect it.
  virtual void integrate_pose_factor(const Factor& factor) = 0;

  virtual const FactorGraph& graph() const = 0;
  virtual int current_step() const = 0;
  virtual int robot() const = 0;
};

/// Linear-Gaussian landmark SLAM: pose chain plus landmark observation
/// factors; landmarks are created on first sighting.
class LandmarkSlamEngine : public SlamEngine {
 public:
  LandmarkSlamEngine(int robot, const Eigen::Vector3d& prior_mean,
                     const Eigen::Matrix3d& prior_cov);

  void advance(const OdometryReading& odo, const std::vector<LandmarkSighting>& sightings,
               const std::optional<PoseFix>& fix, int k) override;
  Factor pose_marginal(const std::vector<int>& timesteps, uint32_t seq) override;
  void integrate_pose_factor(const Factor& factor) override;
  const FactorGraph& graph() const override { return graph_; }
  int current_step() const override { return step_; }
  int robot() const override { return robot_; }

  const std::set<int>& known_landmarks() const { return landmarks_; }
  /// Marginal over one landmark (map queries for tests and reports).
  CanonicalGaussian landmark_marginal(int landmark) const;

 private:
  int robot_;
  int step_ = 0;
  uint32_t seq_ = 0;
  FactorGraph graph_;
  std::set<int> landmarks_;
};

/// Dead-reckoning engine: pose chain only, plus optional absolute-pose fix
/// factors at configured timesteps (scheduled loop-closure stand-ins).
class OdometrySlamEngine : public SlamEngine {
 public:
  OdometrySlamEngine(int robot, const Eigen::Vector3d& prior_mean,
                     const Eigen::Matrix3d& prior_cov);

  void advance(const OdometryReading& odo, const std::vector<LandmarkSighting>& sightings,
               const std::optional<PoseFix>& fix, int k) override;
  Factor pose_marginal(const std::vector<int>& timesteps, uint32_t seq) override;
  void integrate_pose_factor(const Factor& factor) override;
  const FactorGraph& graph() const override { return graph_; }
  int current_step() const override { return step_; }
  int robot() const override { return robot_; }

 private:
  int robot_;
  int step_ = 0;
  uint32_t seq_ = 0;
  FactorGraph graph_;
};

}  // namespace hetfuse
