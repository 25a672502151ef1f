#include "hetfuse/robot_agent.hpp"

#include <algorithm>

#include "hetfuse/errors.hpp"

namespace hetfuse {

RobotAgent::RobotAgent(const ScenarioConfig& config, int robot)
    : id_(robot),
      config_(&config),
      internal_cf_(Endpoint::slam_module(robot), Endpoint::tracking_module(robot)) {
  if (robot < 0 || robot >= static_cast<int>(config.robots.size())) {
    throw ConfigError("no robot " + std::to_string(robot) + " in scenario");
  }
  const RobotSpec& spec = config.robots[static_cast<std::size_t>(robot)];
  targets_ = spec.targets;
  dynamics_ = TargetDynamics::with_dt(config.dt, config.estimator_process_noise);

  // (i) the local SLAM engine
  const Eigen::Vector3d start(spec.path.front().x(), spec.path.front().y(), 0.0);
  Eigen::Vector3d nominal_start = start;
  if (spec.path.size() > 1) {
    const Eigen::Vector2d d = spec.path[1] - spec.path[0];
    if (d.norm() > 1e-12) nominal_start.z() = std::atan2(d.y(), d.x());
  }
  const Eigen::Matrix3d prior_cov =
      spec.pose_prior_sigma.array().square().matrix().asDiagonal();
  if (spec.engine == EngineKind::Landmark) {
    slam_ = std::make_unique<LandmarkSlamEngine>(robot, nominal_start, prior_cov);
  } else {
    slam_ = std::make_unique<OdometrySlamEngine>(robot, nominal_start, prior_cov);
  }

  // (ii) the tracking graph, with target priors at step 0
  std::map<int, CanonicalGaussian> priors;
  for (int t : targets_) {
    const TargetSpec& ts = config.targets[static_cast<std::size_t>(t)];
    tracking_.add_variable(VariableId::target_state(t, 0));
    Factor prior = prior_factor(VariableId::target_state(t, 0), ts.prior_mean,
                                ts.prior_sigma.array().square().matrix().asDiagonal(),
                                next_id(FactorOrigin::Prior));
    priors.emplace(t, prior.potential);
    tracking_.add_factor(std::move(prior));
  }

  // (iii) the CF stack: one internal channel plus one per neighbor. Each
  // neighbor channel starts with the shared targets' step-0 instances and
  // a common pdf equal to their priors: both endpoints hold that
  // information by construction, and it must not be counted twice.
  std::map<int, std::set<int>> neighbor_targets;
  for (int j : config.neighbors_of(robot)) {
    const std::set<int> shared = config.common_targets(robot, j);
    neighbor_targets[j] = shared;
    ChannelFilter cf(Endpoint::peer(std::min(robot, j)), Endpoint::peer(std::max(robot, j)));
    std::vector<VariableId> shared_vars;
    for (int t : shared) shared_vars.push_back(VariableId::target_state(t, 0));
    cf.extend_shared(shared_vars);
    for (int t : shared) cf.absorb_shared_factor(priors.at(t));
    neighbor_cfs_.emplace(j, std::move(cf));
  }
  partition_ = VariablePartition(robot, targets_, std::move(neighbor_targets));

  belief_ = tracking_.marginal(belief_vars());
}

const ChannelFilter& RobotAgent::neighbor_cf(int j) const {
  auto it = neighbor_cfs_.find(j);
  if (it == neighbor_cfs_.end()) {
    throw ConfigError("robot " + std::to_string(id_) + " has no channel to " + std::to_string(j));
  }
  return it->second;
}

std::vector<VariableId> RobotAgent::shared_pose_vars() const {
  std::vector<VariableId> vars;
  vars.reserve(shared_steps_.size());
  for (int k : shared_steps_) vars.push_back(VariableId::robot_pose(id_, k));
  return vars;
}

std::vector<VariableId> RobotAgent::belief_vars() const {
  std::vector<VariableId> vars = shared_pose_vars();
  for (int t : targets_) vars.push_back(VariableId::target_state(t, step_));
  return vars;
}

void RobotAgent::step(int k, const RobotStepData& io,
                      const std::vector<Eigen::Vector2d>& target_inputs) {
  if (k != step_ + 1) {
    throw Error("agent " + std::to_string(id_) + " expects step " + std::to_string(step_ + 1));
  }

  // 2: run SLAM.
  slam_->advance(io.odo, io.sightings, io.fix, k);

  // Target chains extend by one instance; the dynamics factor is common
  // knowledge on every channel sharing that target.
  std::vector<CanonicalGaussian> new_potentials;
  for (int t : targets_) {
    Eigen::Vector2d u = Eigen::Vector2d::Zero();
    if (config_->known_input && static_cast<std::size_t>(t) < target_inputs.size()) {
      u = target_inputs[static_cast<std::size_t>(t)];
    }
    tracking_.add_variable(VariableId::target_state(t, k));
    Factor dyn = dynamics_factor(dynamics_, t, k - 1, u, next_id(FactorOrigin::Dynamics));
    new_potentials.push_back(dyn.potential);
    for (auto& [j, cf] : neighbor_cfs_) {
      if (!partition_.is_common_with(t, j)) continue;
      cf.extend_shared({VariableId::target_state(t, k)});
      cf.absorb_shared_factor(dyn.potential);
    }
    tracking_.add_factor(std::move(dyn));
  }

  const bool detected = !io.measurements.empty();
  if (detected) {
    // 3-5: request pose estimate, pass it through the internal CF, then
    // add the measurement factors.
    integrate_blue(k);
    for (const auto& m : io.measurements) {
      if (m.robot != id_ || m.timestep != k || !targets_.count(m.target)) {
        throw Error("measurement does not belong to robot " + std::to_string(id_));
      }
      Factor f = measurement_factor(m, next_id(FactorOrigin::LocalMeasurement));
      new_potentials.push_back(f.potential);
      tracking_.add_factor(std::move(f));
    }
  }

  // Roll the running belief forward over the step's new factors.
  step_ = k;
  CanonicalGaussian acc = belief_;
  for (const auto& p : new_potentials) acc = multiply(acc, p);
  belief_ = acc.marginalize(dims_of(belief_vars()));

  // 7-8: new tracking data flows back to SLAM.
  if (detected) send_orange();
}

void RobotAgent::integrate_blue(int k) {
  if (!std::binary_search(shared_steps_.begin(), shared_steps_.end(), k)) {
    const VariableId pose = VariableId::robot_pose(id_, k);
    shared_steps_.insert(std::upper_bound(shared_steps_.begin(), shared_steps_.end(), k), k);
    tracking_.add_variable(pose);
    internal_cf_.extend_shared({pose});
  }
  Factor blue = slam_->pose_marginal(shared_steps_, seq_++);
  CanonicalGaussian nu = internal_cf_.novel(blue.potential);
  tracking_.add_factor(Factor{next_id(FactorOrigin::PoseFromSlam), std::move(nu)});
  internal_cf_.update_common(blue.potential);
}

void RobotAgent::send_orange() {
  if (shared_steps_.empty()) return;
  const CanonicalGaussian pose_marg = belief_.marginalize(dims_of(shared_pose_vars()));
  CanonicalGaussian nu = internal_cf_.novel(pose_marg);
  slam_->integrate_pose_factor(Factor{next_id(FactorOrigin::PoseFromTracking), std::move(nu)});
  internal_cf_.update_common(pose_marg);
}

void RobotAgent::refresh_belief_from_graph(const std::vector<VariableId>& extra_shared) {
  std::vector<VariableId> keep = belief_vars();
  keep.insert(keep.end(), extra_shared.begin(), extra_shared.end());
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  belief_ = tracking_.marginal(keep).marginalize(dims_of(belief_vars()));
}

CanonicalGaussian RobotAgent::current_targets_marginal() const {
  std::vector<VariableId> vars;
  for (int t : targets_) vars.push_back(VariableId::target_state(t, step_));
  return belief_.marginalize(dims_of(vars));
}

std::pair<Eigen::Vector4d, Eigen::Matrix4d> RobotAgent::target_estimate(int target) const {
  if (!targets_.count(target)) {
    throw Error("robot " + std::to_string(id_) + " does not track target " +
                std::to_string(target));
  }
  const auto [mean, cov] =
      belief_.marginalize(dims_of(VariableId::target_state(target, step_))).to_moments();
  return {Eigen::Vector4d(mean), Eigen::Matrix4d(cov)};
}

std::map<int, std::pair<Eigen::Vector4d, Eigen::Matrix4d>> RobotAgent::target_estimates() const {
  std::map<int, std::pair<Eigen::Vector4d, Eigen::Matrix4d>> out;
  if (targets_.empty()) return out;
  const auto [mean, cov] = current_targets_marginal().to_moments();
  // Current instances sort by target id, 4 dims each.
  Eigen::Index off = 0;
  for (int t : targets_) {
    out.emplace(t, std::pair{Eigen::Vector4d(mean.segment(off, 4)),
                             Eigen::Matrix4d(cov.block(off, off, 4, 4))});
    off += 4;
  }
  return out;
}

std::pair<Eigen::Vector3d, Eigen::Matrix3d> RobotAgent::pose_estimate() const {
  const auto [mean, cov] =
      slam_->graph().marginal({VariableId::robot_pose(id_, slam_->current_step())}).to_moments();
  return {Eigen::Vector3d(mean), Eigen::Matrix3d(cov)};
}

FactorGraph RobotAgent::monolithic_union_graph() const {
  FactorGraph g;
  for (const auto& v : slam_->graph().variables()) g.add_variable(v);
  for (const auto& v : tracking_.variables()) {
    if (!g.has_variable(v)) g.add_variable(v);
  }
  for (const auto& f : slam_->graph().factors()) {
    if (f.id.origin != FactorOrigin::PoseFromTracking) g.add_factor(f);
  }
  for (const auto& f : tracking_.factors()) {
    if (f.id.origin != FactorOrigin::PoseFromSlam) g.add_factor(f);
  }
  return g;
}

nlohmann::json RobotAgent::dump() const {
  nlohmann::json j;
  j["robot"] = id_;
  j["step"] = step_;
  j["slam_graph"] = slam_->graph().to_json();
  j["tracking_graph"] = tracking_.to_json();
  j["internal_cf"] = internal_cf_.to_json();
  nlohmann::json cfs = nlohmann::json::object();
  for (const auto& [n, cf] : neighbor_cfs_) cfs[std::to_string(n)] = cf.to_json();
  j["neighbor_cfs"] = std::move(cfs);
  return j;
}

void exchange_pair(RobotAgent& a, RobotAgent& b, int k,
                   std::vector<nlohmann::json>* message_log) {
  if (a.current_step() != k || b.current_step() != k) {
    throw Error("exchange at step " + std::to_string(k) + " with agents at steps " +
                std::to_string(a.current_step()) + "/" + std::to_string(b.current_step()));
  }
  auto ita = a.neighbor_cfs_.find(b.id());
  auto itb = b.neighbor_cfs_.find(a.id());
  if (ita == a.neighbor_cfs_.end() || itb == b.neighbor_cfs_.end()) {
    throw ConfigError("no channel between robots " + std::to_string(a.id()) + " and " +
                      std::to_string(b.id()));
  }
  ChannelFilter& cf_a = ita->second;
  ChannelFilter& cf_b = itb->second;

  const FusionMessage msg_a = prepare_message(a.tracking_, cf_a, a.id(), b.id(), k);
  const FusionMessage msg_b = prepare_message(b.tracking_, cf_b, b.id(), a.id(), k);

  Factor for_a = fuse(a.tracking_, cf_a, msg_b, a.seq_++);
  Factor for_b = fuse(b.tracking_, cf_b, msg_a, b.seq_++);
  a.tracking_.add_factor(std::move(for_a));
  b.tracking_.add_factor(std::move(for_b));
  cf_a.record_seen(msg_a.provenance);
  cf_b.record_seen(msg_b.provenance);

  const CanonicalGaussian fused = fused_common(msg_a, msg_b, cf_a.common());
  cf_a.update_common(fused);
  cf_b.update_common(fused);

  a.refresh_belief_from_graph(cf_a.shared_variables());
  b.refresh_belief_from_graph(cf_b.shared_variables());

  // 7-8: fusion is new tracking data; it flows back to each SLAM module.
  a.send_orange();
  b.send_orange();

  if (message_log) {
    for (const FusionMessage* m : {&msg_a, &msg_b}) {
      nlohmann::json e;
      e["step"] = k;
      e["sender"] = m->sender;
      e["receiver"] = m->receiver;
      e["shared_dims"] = m->marginal.size();
      e["provenance_size"] = m->provenance.size();
      message_log->push_back(std::move(e));
    }
  }
}

}  // namespace hetfuse
