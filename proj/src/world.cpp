#include "hetfuse/world.hpp"

#include <algorithm>
#include <cmath>

#include "hetfuse/errors.hpp"

namespace hetfuse {

namespace {

// Nominal waypoint-follower trajectory: speed * dt per step toward the
// next waypoint, heading along the direction of motion.
std::vector<Eigen::Vector3d> nominal_path(const RobotSpec& r, int horizon, double dt) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(static_cast<std::size_t>(horizon) + 1);
  Eigen::Vector2d pos = r.path.front();
  std::size_t wp = 1;
  double heading = 0.0;
  if (r.path.size() > 1) {
    const Eigen::Vector2d d = r.path[1] - r.path[0];
    if (d.norm() > 1e-12) heading = std::atan2(d.y(), d.x());
  }
  out.emplace_back(pos.x(), pos.y(), heading);
  for (int k = 1; k <= horizon; ++k) {
    double budget = r.speed * dt;
    while (budget > 1e-12 && wp < r.path.size()) {
      const Eigen::Vector2d to_wp = r.path[wp] - pos;
      const double dist = to_wp.norm();
      if (dist < 1e-12) {
        ++wp;
        continue;
      }
      heading = std::atan2(to_wp.y(), to_wp.x());
      const double move = std::min(budget, dist);
      pos += to_wp / dist * move;
      budget -= move;
      if (move >= dist - 1e-12) ++wp;
    }
    out.emplace_back(pos.x(), pos.y(), heading);
  }
  return out;
}

}  // namespace

WorldSim::WorldSim(const ScenarioConfig& config, uint64_t seed)
    : config_(config), rng_(seed), unit_(0.0, 1.0) {
  config_.validate();
  trace_.seed = seed;
  trace_.horizon = config_.horizon;

  for (const auto& r : config_.robots) {
    nominal_poses_.push_back(nominal_path(r, config_.horizon, config_.dt));
  }

  // Initial truth. Targets are drawn from their priors; robot starts are
  // drawn from the pose priors around the nominal path start, so the
  // estimators' priors match the generating distribution exactly.
  trace_.target_truth.assign(static_cast<std::size_t>(config_.horizon) + 1, {});
  trace_.robot_truth.assign(static_cast<std::size_t>(config_.horizon) + 1, {});
  trace_.target_inputs.assign(static_cast<std::size_t>(config_.horizon) + 1, {});
  trace_.sensed.assign(static_cast<std::size_t>(config_.horizon) + 1, {});

  for (const auto& t : config_.targets) {
    trace_.target_truth[0].push_back(t.prior_mean + gaussian4(t.prior_sigma));
  }
  for (const auto& r : config_.robots) {
    trace_.robot_truth[0].push_back(nominal_poses_[static_cast<std::size_t>(r.id)][0] +
                                    gaussian3(r.pose_prior_sigma));
  }
}

Eigen::Vector2d WorldSim::gaussian2(const Eigen::Vector2d& sigma) {
  Eigen::Vector2d v;
  for (int i = 0; i < 2; ++i) v(i) = sigma(i) * unit_(rng_);
  return v;
}

Eigen::Vector3d WorldSim::gaussian3(const Eigen::Vector3d& sigma) {
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = sigma(i) * unit_(rng_);
  return v;
}

Eigen::Vector4d WorldSim::gaussian4(const Eigen::Vector4d& sigma) {
  Eigen::Vector4d v;
  for (int i = 0; i < 4; ++i) v(i) = sigma(i) * unit_(rng_);
  return v;
}

void WorldSim::step_world(int k) {
  if (k != step_ + 1 || k > config_.horizon) {
    throw Error("step_world expects step " + std::to_string(step_ + 1));
  }
  const auto dyn = TargetDynamics::with_dt(config_.dt, config_.world_process_noise);
  const double wsig = std::sqrt(config_.world_process_noise);

  // Targets advance with their scripted inputs and sampled process noise.
  auto& truth_k = trace_.target_truth[static_cast<std::size_t>(k)];
  auto& inputs_k = trace_.target_inputs[static_cast<std::size_t>(k)];
  for (const auto& t : config_.targets) {
    const Eigen::Vector2d u = t.input_at(k - 1);
    const Eigen::Vector4d prev =
        trace_.target_truth[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(t.id)];
    const Eigen::Vector4d noise = gaussian4(Eigen::Vector4d::Constant(wsig));
    truth_k.push_back(dyn.F * prev + dyn.G * u + noise);
    inputs_k.push_back(u);
  }

  // Robots follow the scripted deltas exactly; odometry measures them.
  auto& poses_k = trace_.robot_truth[static_cast<std::size_t>(k)];
  for (const auto& r : config_.robots) {
    const auto& nom = nominal_poses_[static_cast<std::size_t>(r.id)];
    const Eigen::Vector3d delta =
        nom[static_cast<std::size_t>(k)] - nom[static_cast<std::size_t>(k) - 1];
    poses_k.push_back(trace_.robot_truth[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(r.id)] +
                      delta);
  }

  // Per-robot sensing, in robot-id order with fixed draw order inside.
  auto& sensed_k = trace_.sensed[static_cast<std::size_t>(k)];
  for (const auto& r : config_.robots) {
    RobotStepData data;
    const auto& nom = nominal_poses_[static_cast<std::size_t>(r.id)];
    const Eigen::Vector3d delta =
        nom[static_cast<std::size_t>(k)] - nom[static_cast<std::size_t>(k) - 1];
    data.odo.delta = delta + gaussian3(r.odometry_sigma);
    data.odo.cov = r.odometry_sigma.array().square().matrix().asDiagonal();

    const Eigen::Vector3d pose = poses_k[static_cast<std::size_t>(r.id)];

    if (std::find(r.fix_steps.begin(), r.fix_steps.end(), k) != r.fix_steps.end()) {
      PoseFix fix;
      fix.pose = pose + gaussian3(Eigen::Vector3d::Constant(r.fix_sigma));
      fix.cov = r.fix_sigma * r.fix_sigma * Eigen::Matrix3d::Identity();
      data.fix = fix;
    }

    for (std::size_t li = 0; li < config_.landmarks.size(); ++li) {
      const Eigen::Vector2d rel = config_.landmarks[li] - pose.head<2>();
      if (rel.norm() > r.sensor_range) continue;
      LandmarkSighting s;
      s.landmark = static_cast<int>(li);
      s.rel = rel + gaussian2(Eigen::Vector2d::Constant(r.landmark_obs_sigma));
      s.cov = r.landmark_obs_sigma * r.landmark_obs_sigma * Eigen::Matrix2d::Identity();
      data.sightings.push_back(s);
    }

    for (int t : r.targets) {
      const Eigen::Vector4d& ts = truth_k[static_cast<std::size_t>(t)];
      const Eigen::Vector2d tpos(ts(0), ts(2));
      if ((tpos - pose.head<2>()).norm() > r.detection_range) continue;
      RelativePositionMeasurement m;
      m.robot = r.id;
      m.target = t;
      m.timestep = k;
      m.y = (pose.head<2>() - tpos) + gaussian2(Eigen::Vector2d::Constant(r.measurement_sigma));
      m.R = r.measurement_sigma * r.measurement_sigma * Eigen::Matrix2d::Identity();
      data.measurements.push_back(m);
    }

    sensed_k.push_back(std::move(data));
  }
  step_ = k;
}

const RobotStepData& WorldSim::observe(int robot, int k) const {
  if (k < 1 || k > step_) throw Error("observe: step " + std::to_string(k) + " not simulated");
  return trace_.sensed[static_cast<std::size_t>(k)].at(static_cast<std::size_t>(robot));
}

WorldTrace simulate_world(const ScenarioConfig& config, uint64_t seed) {
  WorldSim sim(config, seed);
  for (int k = 1; k <= config.horizon; ++k) sim.step_world(k);
  return sim.trace();
}

}  // namespace hetfuse
