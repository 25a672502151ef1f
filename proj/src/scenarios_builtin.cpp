#include <algorithm>

#include "hetfuse/errors.hpp"
#include "hetfuse/scenario.hpp"

namespace hetfuse {

namespace {

RobotSpec patrol_robot(int id, Eigen::Vector2d from, Eigen::Vector2d to, double speed) {
  RobotSpec r;
  r.id = id;
  r.path = {from, to, from};
  r.speed = speed;
  r.detection_range = 25.0;
  r.sensor_range = 12.0;
  return r;
}

TargetSpec drifting_target(int id, double x, double y, double vx = 0.0, double vy = 0.0) {
  TargetSpec t;
  t.id = id;
  t.prior_mean << x, vx, y, vy;
  t.prior_sigma << 1.0, 0.3, 1.0, 0.3;
  return t;
}

// Two robots patrolling parallel corridors, five targets in between,
// targets 0 and 1 tracked by both. Exchanges every 10 steps.
ScenarioConfig make_default() {
  ScenarioConfig c;
  c.name = "default";
  c.horizon = 100;
  c.seed = 7001;
  c.edges = {{0, 1, 10}};

  RobotSpec r0 = patrol_robot(0, {0, 0}, {24, 0}, 0.5);
  r0.targets = {0, 1, 2};
  RobotSpec r1 = patrol_robot(1, {0, 8}, {24, 8}, 0.5);
  r1.targets = {0, 1, 3, 4};
  c.robots = {r0, r1};

  c.targets = {drifting_target(0, 6, 3, 0.05, 0.0), drifting_target(1, 14, 5, -0.05, 0.0),
               drifting_target(2, 4, 1), drifting_target(3, 18, 7), drifting_target(4, 10, 6)};
  c.landmarks = {{5, -3}, {12, 11}, {20, -2}, {8, 4}, {16, 6}};
  return c;
}

// The tree-exactness workhorse: both targets common, exchange every step.
ScenarioConfig make_exact_2robot() {
  ScenarioConfig c;
  c.name = "exact_2robot";
  c.horizon = 50;
  c.seed = 4101;
  c.edges = {{0, 1, 1}};

  RobotSpec r0 = patrol_robot(0, {0, 0}, {16, 0}, 0.4);
  r0.targets = {0, 1};
  RobotSpec r1 = patrol_robot(1, {0, 8}, {16, 8}, 0.4);
  r1.targets = {0, 1};
  c.robots = {r0, r1};

  c.targets = {drifting_target(0, 6, 3), drifting_target(1, 12, 5)};
  c.landmarks = {{4, -2}, {10, 10}, {14, -1}};
  return c;
}

ScenarioConfig make_chain_3robot() {
  ScenarioConfig c;
  c.name = "chain_3robot";
  c.horizon = 50;
  c.seed = 4202;
  c.edges = {{0, 1, 1}, {1, 2, 1}};

  RobotSpec r0 = patrol_robot(0, {0, 0}, {16, 0}, 0.4);
  RobotSpec r1 = patrol_robot(1, {0, 6}, {16, 6}, 0.4);
  RobotSpec r2 = patrol_robot(2, {0, 12}, {16, 12}, 0.4);
  r0.targets = r1.targets = r2.targets = {0, 1};
  c.robots = {r0, r1, r2};

  c.targets = {drifting_target(0, 8, 3), drifting_target(1, 14, 9)};
  c.landmarks = {{4, -2}, {10, 14}, {14, 3}};
  return c;
}

ScenarioConfig make_single_robot(EngineKind engine) {
  ScenarioConfig c;
  c.name = engine == EngineKind::Landmark ? "single_robot" : "single_robot_odometry";
  c.horizon = 20;
  c.seed = 3301;

  RobotSpec r0 = patrol_robot(0, {0, 0}, {14, 0}, 0.7);
  r0.engine = engine;
  r0.targets = {0};
  r0.detection_range = 12.0;
  if (engine == EngineKind::Odometry) r0.fix_steps = {7, 14};
  c.robots = {r0};

  c.targets = {drifting_target(0, 5, 4)};
  c.landmarks = {{3, -2}, {7, 3}, {12, -1}};
  return c;
}

// Robot 0 measures the common target only before step 10 (it drives away);
// robot 1 keeps measuring it. Target 1 and the map are robot 0's
// non-mutual variables; fusion at step 15 must tighten them indirectly.
ScenarioConfig make_indirect_update() {
  ScenarioConfig c;
  c.name = "indirect_update";
  c.horizon = 20;
  c.seed = 5501;
  c.world_process_noise = 0.01;
  c.estimator_process_noise = 0.01;
  c.edges = {{0, 1, 15}};

  RobotSpec r0;
  r0.id = 0;
  r0.path = {{-2, 2}, {34, 2}};
  r0.speed = 1.2;
  r0.detection_range = 8.0;
  r0.sensor_range = 12.0;
  r0.targets = {0, 1};
  RobotSpec r1;
  r1.id = 1;
  r1.path = {{0, 6}, {4, 6}, {0, 6}, {4, 6}};
  r1.speed = 0.3;
  r1.detection_range = 8.0;
  r1.sensor_range = 10.0;
  r1.targets = {0};
  c.robots = {r0, r1};

  TargetSpec t0 = drifting_target(0, 0, 0);
  t0.prior_sigma << 0.8, 0.1, 0.8, 0.1;
  TargetSpec t1 = drifting_target(1, 2, -3);
  t1.id = 1;
  t1.prior_sigma << 0.8, 0.1, 0.8, 0.1;
  c.targets = {t0, t1};
  c.landmarks = {{1, 1}, {6, 3}, {11, 1}};
  return c;
}

ScenarioConfig with_mixed_engines(ScenarioConfig c) {
  c.name += "_mixed";
  c.seed += 17;
  RobotSpec& r = c.robots.back();
  r.engine = EngineKind::Odometry;
  r.fix_steps.clear();
  for (int k = 10; k <= c.horizon; k += 10) r.fix_steps.push_back(k);
  return c;
}

}  // namespace

ScenarioConfig builtin_scenario(const std::string& name) {
  ScenarioConfig c;
  if (name == "default") {
    c = make_default();
  } else if (name == "default_mixed") {
    c = with_mixed_engines(make_default());
  } else if (name == "default_misspecified") {
    c = make_default();
    c.name = "default_misspecified";
    c.world_process_noise = 0.8;  // 10x what the estimators assume
  } else if (name == "exact_2robot") {
    c = make_exact_2robot();
  } else if (name == "exact_2robot_mixed") {
    c = with_mixed_engines(make_exact_2robot());
  } else if (name == "chain_3robot") {
    c = make_chain_3robot();
  } else if (name == "single_robot") {
    c = make_single_robot(EngineKind::Landmark);
  } else if (name == "single_robot_odometry") {
    c = make_single_robot(EngineKind::Odometry);
  } else if (name == "indirect_update") {
    c = make_indirect_update();
  } else {
    throw ConfigError("unknown builtin scenario '" + name + "'; known: " + [] {
      std::string s;
      for (const auto& n : builtin_scenario_names()) s += n + " ";
      return s;
    }());
  }
  c.validate();
  return c;
}

std::vector<std::string> builtin_scenario_names() {
  return {"default",      "default_mixed",     "default_misspecified",
          "exact_2robot", "exact_2robot_mixed", "chain_3robot",
          "single_robot", "single_robot_odometry", "indirect_update"};
}

}  // namespace hetfuse
