#include "hetfuse/harness.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hetfuse/errors.hpp"
#include "hetfuse/network.hpp"

namespace hetfuse {

namespace {

Topology topology_of(const ScenarioConfig& config) {
  Topology topo;
  topo.nodes = static_cast<int>(config.robots.size());
  for (const auto& e : config.edges) topo.edges.push_back({e.a, e.b, e.period});
  return topo;
}

// Shared driver state for one decentralized run.
struct LiveRun {
  LiveRun(const ScenarioConfig& config, uint64_t seed)
      : config(config),
        world(config, seed),
        topo(topology_of(config)),
        drop_rng(seed ^ 0x9e3779b97f4a7c15ULL) {
    for (int r = 0; r < static_cast<int>(config.robots.size()); ++r) {
      agents.emplace_back(config, r);
    }
  }

  void step_agents(int k, bool parallel) {
    world.step_world(k);
    const auto& inputs = world.trace().target_inputs[static_cast<std::size_t>(k)];
    std::vector<std::string> errors(agents.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (int r = 0; r < static_cast<int>(agents.size()); ++r) {
      try {
        agents[static_cast<std::size_t>(r)].step(k, world.observe(r, k), inputs);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(r)] = e.what();
      }
    }
    for (std::size_t r = 0; r < errors.size(); ++r) {
      if (!errors[r].empty()) {
        throw Error("step " + std::to_string(k) + ", robot " + std::to_string(r) + ": " +
                    errors[r]);
      }
    }
  }

  const ScenarioConfig& config;
  WorldSim world;
  Topology topo;
  std::mt19937_64 drop_rng;
  std::vector<RobotAgent> agents;
};

void record_step(const ScenarioConfig& config, const std::vector<RobotAgent>& agents,
                 const WorldTrace& trace, int k, RunReport& report) {
  for (const auto& agent : agents) {
    const int r = agent.id();
    PoseRecord pr;
    pr.step = k;
    pr.robot = r;
    const auto [pm, pc] = agent.pose_estimate();
    pr.mean = pm;
    pr.cov = pc;
    pr.truth = trace.robot_truth[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)];
    report.poses.push_back(pr);

    for (const auto& [t, est] : agent.target_estimates()) {
      TargetRecord tr;
      tr.step = k;
      tr.robot = r;
      tr.target = t;
      tr.mean = est.first;
      tr.cov = est.second;
      tr.truth = trace.target_truth[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)];
      tr.nees = nees(tr.mean - tr.truth, tr.cov);
      tr.pos_error = std::hypot(tr.mean(0) - tr.truth(0), tr.mean(2) - tr.truth(2));
      report.targets.push_back(tr);
    }

    nlohmann::json a;
    a["step"] = k;
    a["robot"] = r;
    a["pose_mean"] = {pm.x(), pm.y(), pm.z()};
    a["shared_pose_steps"] = agent.shared_pose_steps().size();
    a["internal_cf_dims"] = agent.internal_cf().shared_dims().size();
    nlohmann::json cfs = nlohmann::json::object();
    for (int j : config.neighbors_of(r)) {
      cfs[std::to_string(j)] = {{"shared_dims", agent.neighbor_cf(j).shared_dims().size()},
                                {"seen", agent.neighbor_cf(j).seen_factors().size()}};
    }
    a["neighbor_cfs"] = std::move(cfs);
    report.agent_log.push_back(std::move(a));
  }
}

}  // namespace

std::vector<double> RunReport::rmse_series(int robot) const {
  std::vector<double> sum(static_cast<std::size_t>(horizon) + 1, 0.0);
  std::vector<int> count(static_cast<std::size_t>(horizon) + 1, 0);
  for (const auto& t : targets) {
    if (t.robot != robot) continue;
    sum[static_cast<std::size_t>(t.step)] += t.pos_error * t.pos_error;
    count[static_cast<std::size_t>(t.step)] += 1;
  }
  std::vector<double> out(sum.size(), 0.0);
  for (std::size_t i = 0; i < sum.size(); ++i) {
    out[i] = count[i] > 0 ? std::sqrt(sum[i] / count[i]) : 0.0;
  }
  return out;
}

RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  const uint64_t seed = options.seed_override.value_or(config.seed);
  LiveRun run(config, seed);

  RunReport report;
  report.scenario_name = config.name;
  report.seed = seed;
  report.horizon = config.horizon;

  record_step(config, run.agents, run.world.trace(), 0, report);
  for (int k = 1; k <= config.horizon; ++k) {
    run.step_agents(k, options.parallel_agents);
    run_schedule(run.agents, run.topo, k, run.drop_rng, config.drop_prob, &report.message_log);
    record_step(config, run.agents, run.world.trace(), k, report);
  }
  return report;
}

CentralizedOracle::CentralizedOracle(const ScenarioConfig& config) : config_(&config) {
  dynamics_ = TargetDynamics::with_dt(config.dt, config.estimator_process_noise);
  for (const auto& r : config.robots) {
    tracked_targets_.insert(r.targets.begin(), r.targets.end());
    Eigen::Vector3d start(r.path.front().x(), r.path.front().y(), 0.0);
    if (r.path.size() > 1) {
      const Eigen::Vector2d d = r.path[1] - r.path[0];
      if (d.norm() > 1e-12) start.z() = std::atan2(d.y(), d.x());
    }
    graph_.add_variable(VariableId::robot_pose(r.id, 0));
    graph_.add_factor(prior_factor(VariableId::robot_pose(r.id, 0), start,
                                   r.pose_prior_sigma.array().square().matrix().asDiagonal(),
                                   next_id(FactorOrigin::Prior, r.id)));
  }
  // Shared knowledge enters exactly once.
  for (int t : tracked_targets_) {
    const TargetSpec& ts = config.targets[static_cast<std::size_t>(t)];
    graph_.add_variable(VariableId::target_state(t, 0));
    graph_.add_factor(prior_factor(VariableId::target_state(t, 0), ts.prior_mean,
                                   ts.prior_sigma.array().square().matrix().asDiagonal(),
                                   next_id(FactorOrigin::Prior)));
  }
}

void CentralizedOracle::ingest_step(const WorldTrace& trace, int k) {
  if (k != step_ + 1) throw Error("oracle expects step " + std::to_string(step_ + 1));
  const auto& inputs = trace.target_inputs[static_cast<std::size_t>(k)];
  for (int t : tracked_targets_) {
    Eigen::Vector2d u = Eigen::Vector2d::Zero();
    if (config_->known_input) u = inputs[static_cast<std::size_t>(t)];
    graph_.add_variable(VariableId::target_state(t, k));
    graph_.add_factor(dynamics_factor(dynamics_, t, k - 1, u, next_id(FactorOrigin::Dynamics)));
  }
  for (const auto& r : config_->robots) {
    const RobotStepData& data = trace.at(k, r.id);
    graph_.add_variable(VariableId::robot_pose(r.id, k));
    graph_.add_factor(odometry_factor(r.id, k, data.odo, next_id(FactorOrigin::Odometry, r.id)));
    if (data.fix) {
      graph_.add_factor(prior_factor(VariableId::robot_pose(r.id, k), data.fix->pose,
                                     data.fix->cov, next_id(FactorOrigin::Prior, r.id)));
    }
    if (r.engine == EngineKind::Landmark) {
      for (const auto& s : data.sightings) {
        if (known_landmarks_.insert({r.id, s.landmark}).second) {
          graph_.add_variable(VariableId::landmark(r.id, s.landmark));
        }
        graph_.add_factor(
            landmark_factor(r.id, k, s, next_id(FactorOrigin::LocalMeasurement, r.id)));
      }
    }
    for (const auto& m : data.measurements) {
      graph_.add_factor(measurement_factor(m, next_id(FactorOrigin::LocalMeasurement, r.id)));
    }
  }
  step_ = k;
}

CanonicalGaussian CentralizedOracle::target_marginal(int target) const {
  return graph_.marginal({VariableId::target_state(target, step_)});
}

CanonicalGaussian CentralizedOracle::targets_marginal(const std::vector<int>& targets) const {
  std::vector<VariableId> vars;
  vars.reserve(targets.size());
  for (int t : targets) vars.push_back(VariableId::target_state(t, step_));
  return graph_.marginal(vars);
}

std::pair<Eigen::Vector3d, Eigen::Matrix3d> CentralizedOracle::pose_estimate(int robot) const {
  const auto [mean, cov] = graph_.marginal({VariableId::robot_pose(robot, step_)}).to_moments();
  return {Eigen::Vector3d(mean), Eigen::Matrix3d(cov)};
}

RunReport centralized_oracle(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  const uint64_t seed = options.seed_override.value_or(config.seed);
  const WorldTrace trace = simulate_world(config, seed);
  CentralizedOracle oracle(config);

  RunReport report;
  report.scenario_name = config.name;
  report.seed = seed;
  report.horizon = config.horizon;
  report.oracle = true;

  for (int k = 0; k <= config.horizon; ++k) {
    if (k > 0) oracle.ingest_step(trace, k);
    // Estimates are global; recorded per robot for comparability.
    std::map<int, std::pair<Eigen::Vector4d, Eigen::Matrix4d>> split;
    {
      std::vector<int> ts;
      for (const auto& r : config.robots) ts.insert(ts.end(), r.targets.begin(), r.targets.end());
      std::sort(ts.begin(), ts.end());
      ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
      if (!ts.empty()) {
        const auto [mean, cov] = oracle.targets_marginal(ts).to_moments();
        Eigen::Index off = 0;
        for (int t : ts) {
          split.emplace(t, std::pair{Eigen::Vector4d(mean.segment(off, 4)),
                                     Eigen::Matrix4d(cov.block(off, off, 4, 4))});
          off += 4;
        }
      }
    }
    for (const auto& r : config.robots) {
      PoseRecord pr;
      pr.step = k;
      pr.robot = r.id;
      const auto [pm, pc] = oracle.pose_estimate(r.id);
      pr.mean = pm;
      pr.cov = pc;
      pr.truth = trace.robot_truth[static_cast<std::size_t>(k)][static_cast<std::size_t>(r.id)];
      report.poses.push_back(pr);
      for (int t : r.targets) {
        TargetRecord tr;
        tr.step = k;
        tr.robot = r.id;
        tr.target = t;
        tr.mean = split.at(t).first;
        tr.cov = split.at(t).second;
        tr.truth = trace.target_truth[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)];
        tr.nees = nees(tr.mean - tr.truth, tr.cov);
        tr.pos_error = std::hypot(tr.mean(0) - tr.truth(0), tr.mean(2) - tr.truth(2));
        report.targets.push_back(tr);
      }
    }
  }
  return report;
}

OracleCompare compare_with_oracle(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  if (config.drop_prob > 0.0) {
    throw ConfigError("exactness comparison requires drop_prob = 0");
  }
  const uint64_t seed = options.seed_override.value_or(config.seed);
  LiveRun run(config, seed);
  CentralizedOracle oracle(config);

  OracleCompare out;
  for (int k = 1; k <= config.horizon; ++k) {
    run.step_agents(k, options.parallel_agents);
    oracle.ingest_step(run.world.trace(), k);

    const auto due = edges_due(run.topo, k);
    std::set<int> exchanged;
    std::pair<int, int> last_edge{-1, -1};
    for (const auto& e : due) {
      RobotAgent& a = run.agents[static_cast<std::size_t>(std::min(e.a, e.b))];
      RobotAgent& b = run.agents[static_cast<std::size_t>(std::max(e.a, e.b))];
      exchange_pair(a, b, k);
      exchanged.insert(a.id());
      exchanged.insert(b.id());
      last_edge = {a.id(), b.id()};

      // Post-exchange endpoint agreement over this edge's common targets.
      for (int t : config.common_targets(a.id(), b.id())) {
        const auto ma = a.belief().marginalize(dims_of(VariableId::target_state(t, k)));
        const auto mb = b.belief().marginalize(dims_of(VariableId::target_state(t, k)));
        out.max_endpoint_disagreement =
            std::max(out.max_endpoint_disagreement, rel_param_diff(ma, mb));
      }
    }
    if (due.empty()) continue;

    for (int r : exchanged) {
      const bool gated = r == last_edge.first || r == last_edge.second;
      std::set<int> commons;
      for (int j : config.neighbors_of(r)) {
        const auto c = config.common_targets(r, j);
        commons.insert(c.begin(), c.end());
      }
      const auto& agent = run.agents[static_cast<std::size_t>(r)];
      for (int t : commons) {
        const auto dec = agent.belief().marginalize(dims_of(VariableId::target_state(t, k)));
        const auto cen = oracle.target_marginal(t);
        OracleCompare::Record rec;
        rec.step = k;
        rec.robot = r;
        rec.target = t;
        rec.rel_diff = rel_param_diff(dec, cen);
        rec.gated = gated;
        out.records.push_back(rec);
        out.max_rel_diff = std::max(out.max_rel_diff, rec.rel_diff);
        if (gated) out.max_gated_rel_diff = std::max(out.max_gated_rel_diff, rec.rel_diff);
      }
    }
  }
  return out;
}

std::vector<RunReport> run_monte_carlo(const ScenarioConfig& config, int n_runs, bool parallel) {
  if (n_runs < 1) throw Error("run_monte_carlo needs at least one run");
  std::vector<RunReport> reports(static_cast<std::size_t>(n_runs));
  std::vector<std::string> errors(static_cast<std::size_t>(n_runs));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int i = 0; i < n_runs; ++i) {
    try {
      RunOptions opt;
      opt.seed_override = config.seed + static_cast<uint64_t>(i);
      reports[static_cast<std::size_t>(i)] = run_scenario(config, opt);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      throw Error("Monte-Carlo run " + std::to_string(i) + " failed: " + errors[i]);
    }
  }
  return reports;
}

NeesSummary nees_report(const std::vector<RunReport>& reports) {
  if (reports.size() < 2) throw Error("nees_report needs at least 2 runs");
  for (const auto& r : reports) {
    if (r.scenario_name != reports.front().scenario_name ||
        r.horizon != reports.front().horizon) {
      throw Error("nees_report: mismatched scenario configs across runs");
    }
  }

  NeesSummary summary;
  summary.runs = static_cast<int>(reports.size());
  summary.horizon = reports.front().horizon;
  summary.bounds = average_nees_bounds(summary.runs, 4);

  // (robot, target) -> per-step sums over runs.
  std::map<std::pair<int, int>, std::vector<double>> sums;
  std::map<std::pair<int, int>, std::vector<int>> counts;
  for (const auto& rep : reports) {
    for (const auto& t : rep.targets) {
      auto key = std::make_pair(t.robot, t.target);
      auto& s = sums[key];
      auto& c = counts[key];
      if (s.empty()) {
        s.assign(static_cast<std::size_t>(summary.horizon) + 1, 0.0);
        c.assign(static_cast<std::size_t>(summary.horizon) + 1, 0);
      }
      s[static_cast<std::size_t>(t.step)] += t.nees;
      c[static_cast<std::size_t>(t.step)] += 1;
    }
  }

  summary.all_pass = true;
  for (const auto& [key, s] : sums) {
    NeesSummary::Entry e;
    e.robot = key.first;
    e.target = key.second;
    double total = 0.0;
    int n = 0;
    const auto& c = counts[key];
    e.per_step_mean.resize(s.size(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      e.per_step_mean[i] = c[i] > 0 ? s[i] / c[i] : 0.0;
      total += s[i];
      n += c[i];
    }
    e.mean_nees = n > 0 ? total / n : 0.0;
    e.pass = e.mean_nees >= summary.bounds.lower && e.mean_nees <= summary.bounds.upper;
    summary.all_pass = summary.all_pass && e.pass;
    summary.entries.push_back(std::move(e));
  }
  return summary;
}

}  // namespace hetfuse
