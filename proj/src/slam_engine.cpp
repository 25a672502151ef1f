#include "hetfuse/slam_engine.hpp"

#include "hetfuse/errors.hpp"

namespace hetfuse {

namespace {

Factor joint_pose_marginal(FactorGraph& graph, int robot, const std::vector<int>& timesteps,
                           uint32_t seq, int current_step) {
  std::vector<VariableId> vars;
  vars.reserve(timesteps.size());
  for (int k : timesteps) {
    const VariableId v = VariableId::robot_pose(robot, k);
    if (k < 0 || k > current_step || !graph.has_variable(v)) {
      throw GraphError("pose marginal requested for unknown timestep " + std::to_string(k));
    }
    vars.push_back(v);
  }
  return Factor{FactorId{FactorOrigin::PoseFromSlam, robot, seq}, graph.marginal(vars)};
}

void check_pose_only_scope(const Factor& f, int robot) {
  if (f.id.origin != FactorOrigin::PoseFromTracking) {
    throw GraphError("SLAM engines only integrate PoseFromTracking factors, got " + f.id.str());
  }
  for (const auto& v : f.scope()) {
    if (v.kind != VarKind::RobotPose || v.owner != robot) {
      throw GraphError("pose factor scope includes non-pose variable " + v.str());
    }
  }
}

}  // namespace

LandmarkSlamEngine::LandmarkSlamEngine(int robot, const Eigen::Vector3d& prior_mean,
                                       const Eigen::Matrix3d& prior_cov)
    : robot_(robot) {
  graph_.add_variable(VariableId::robot_pose(robot_, 0));
  graph_.add_factor(prior_factor(VariableId::robot_pose(robot_, 0), prior_mean, prior_cov,
                                 {FactorOrigin::Prior, robot_, seq_++}));
}

void LandmarkSlamEngine::advance(const OdometryReading& odo,
                                 const std::vector<LandmarkSighting>& sightings,
                                 const std::optional<PoseFix>& fix, int k) {
  if (k != step_ + 1) {
    throw GraphError("advance expects step " + std::to_string(step_ + 1));
  }
  graph_.add_variable(VariableId::robot_pose(robot_, k));
  graph_.add_factor(odometry_factor(robot_, k, odo, {FactorOrigin::Odometry, robot_, seq_++}));
  for (const auto& s : sightings) {
    const VariableId lm = VariableId::landmark(robot_, s.landmark);
    if (!landmarks_.count(s.landmark)) {
      graph_.add_variable(lm);
      landmarks_.insert(s.landmark);
    }
    graph_.add_factor(
        landmark_factor(robot_, k, s, {FactorOrigin::LocalMeasurement, robot_, seq_++}));
  }
  if (fix) {
    graph_.add_factor(prior_factor(VariableId::robot_pose(robot_, k), fix->pose, fix->cov,
                                   {FactorOrigin::Prior, robot_, seq_++}));
  }
  step_ = k;
}

Factor LandmarkSlamEngine::pose_marginal(const std::vector<int>& timesteps, uint32_t seq) {
  return joint_pose_marginal(graph_, robot_, timesteps, seq, step_);
}

void LandmarkSlamEngine::integrate_pose_factor(const Factor& factor) {
  check_pose_only_scope(factor, robot_);
  graph_.add_factor(factor);
}

CanonicalGaussian LandmarkSlamEngine::landmark_marginal(int landmark) const {
  return graph_.marginal({VariableId::landmark(robot_, landmark)});
}

OdometrySlamEngine::OdometrySlamEngine(int robot, const Eigen::Vector3d& prior_mean,
                                       const Eigen::Matrix3d& prior_cov)
    : robot_(robot) {
  graph_.add_variable(VariableId::robot_pose(robot_, 0));
  graph_.add_factor(prior_factor(VariableId::robot_pose(robot_, 0), prior_mean, prior_cov,
                                 {FactorOrigin::Prior, robot_, seq_++}));
}

void OdometrySlamEngine::advance(const OdometryReading& odo,
                                 const std::vector<LandmarkSighting>& /*sightings*/,
                                 const std::optional<PoseFix>& fix, int k) {
  if (k != step_ + 1) {
    throw GraphError("advance expects step " + std::to_string(step_ + 1));
  }
  graph_.add_variable(VariableId::robot_pose(robot_, k));
  graph_.add_factor(odometry_factor(robot_, k, odo, {FactorOrigin::Odometry, robot_, seq_++}));
  if (fix) {
    graph_.add_factor(prior_factor(VariableId::robot_pose(robot_, k), fix->pose, fix->cov,
                                   {FactorOrigin::Prior, robot_, seq_++}));
  }
  step_ = k;
}

Factor OdometrySlamEngine::pose_marginal(const std::vector<int>& timesteps, uint32_t seq) {
  return joint_pose_marginal(graph_, robot_, timesteps, seq, step_);
}

void OdometrySlamEngine::integrate_pose_factor(const Factor& factor) {
  check_pose_only_scope(factor, robot_);
  graph_.add_factor(factor);
}

}  // namespace hetfuse
