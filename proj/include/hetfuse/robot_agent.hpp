#pragma once

#include <map>
#include <memory>
#include <vector>

#include "hetfuse/channel_filter.hpp"
#include "hetfuse/fusion.hpp"
#include "hetfuse/scenario.hpp"
#include "hetfuse/slam_engine.hpp"
#include "hetfuse/world.hpp"

namespace hetfuse {

/// One robot's inner loop: a pluggable SLAM engine, a tracking factor
/// graph over shared pose timesteps and per-timestep target states, an
/// internal channel filter between the two modules, and one channel filter
/// per neighbor over the shared target history.
///
/// Per step: the SLAM engine advances; dynamics factors extend every
/// tracked target's chain (and the neighbor channels' shared sets); on
/// detection the tracking module requests the joint pose marginal over all
/// shared timesteps, integrates its novel part (blue), adds the
/// measurement factors, and sends its own pose marginal's novel part back
/// to SLAM (orange). Exchanges between robots happen between rounds via
/// exchange_pair.
///
/// The agent also maintains `belief`, the exact running marginal over the
/// shared poses and all current target instances. It is a cache of
/// tracking_graph().marginal(...) kept purely so per-step estimates do not
/// re-eliminate the whole history; tests assert the equality.
class RobotAgent {
 public:
  RobotAgent(const ScenarioConfig& config, int robot);

  int id() const { return id_; }
  int current_step() const { return step_; }

  /// Pipeline steps 2-5 and 7-8 for one timestep. `target_inputs` is the
  /// per-target control applied on the k-1 -> k transition (used only when
  /// the scenario says inputs are known to the trackers).
  void step(int k, const RobotStepData& io, const std::vector<Eigen::Vector2d>& target_inputs);

  SlamEngine& slam() { return *slam_; }
  const SlamEngine& slam() const { return *slam_; }
  const FactorGraph& tracking_graph() const { return tracking_; }
  const ChannelFilter& internal_cf() const { return internal_cf_; }
  bool has_neighbor(int j) const { return neighbor_cfs_.count(j) > 0; }
  const ChannelFilter& neighbor_cf(int j) const;
  const VariablePartition& partition() const { return partition_; }
  const std::vector<int>& shared_pose_steps() const { return shared_steps_; }
  const std::set<int>& tracked_targets() const { return targets_; }

  /// Exact marginal over shared poses and current target instances.
  const CanonicalGaussian& belief() const { return belief_; }
  /// Marginal over all tracked targets' current instances.
  CanonicalGaussian current_targets_marginal() const;
  /// Moment-form estimate of one target's current state.
  std::pair<Eigen::Vector4d, Eigen::Matrix4d> target_estimate(int target) const;
  /// Current estimates of all tracked targets (one joint marginal, split).
  std::map<int, std::pair<Eigen::Vector4d, Eigen::Matrix4d>> target_estimates() const;
  /// Moment-form estimate of the robot's current pose, from the SLAM graph.
  std::pair<Eigen::Vector3d, Eigen::Matrix3d> pose_estimate() const;

  /// Union of both modules' primary factors (derived pose transfers
  /// excluded), over the union variable set: the monolithic equivalent the
  /// two-module split must reproduce.
  FactorGraph monolithic_union_graph() const;

  nlohmann::json dump() const;

  friend void exchange_pair(RobotAgent& a, RobotAgent& b, int k,
                            std::vector<nlohmann::json>* message_log);

 private:
  FactorId next_id(FactorOrigin origin) { return FactorId{origin, id_, seq_++}; }
  std::vector<VariableId> belief_vars() const;
  std::vector<VariableId> shared_pose_vars() const;
  void integrate_blue(int k);
  void send_orange();
  void refresh_belief_from_graph(const std::vector<VariableId>& extra_shared);

  int id_ = 0;
  int step_ = 0;
  uint32_t seq_ = 0;
  const ScenarioConfig* config_ = nullptr;
  TargetDynamics dynamics_;
  std::set<int> targets_;
  std::unique_ptr<SlamEngine> slam_;
  FactorGraph tracking_;
  ChannelFilter internal_cf_;
  std::map<int, ChannelFilter> neighbor_cfs_;
  VariablePartition partition_;
  std::vector<int> shared_steps_;  // K, sorted
  CanonicalGaussian belief_;
};

/// Pipeline step 6 on one edge: symmetric prepare/fuse on both endpoints,
/// identical channel-filter updates on both sides, then the post-fusion
/// orange transfer at each robot. Both agents must be at step k.
void exchange_pair(RobotAgent& a, RobotAgent& b, int k,
                   std::vector<nlohmann::json>* message_log = nullptr);

}  // namespace hetfuse
