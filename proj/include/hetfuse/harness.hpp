#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hetfuse/robot_agent.hpp"
#include "hetfuse/scenario.hpp"
#include "hetfuse/stats.hpp"
#include "hetfuse/world.hpp"

namespace hetfuse {

struct TargetRecord {
  int step = 0;
  int robot = 0;
  int target = 0;
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  Eigen::Vector4d truth = Eigen::Vector4d::Zero();
  double nees = 0.0;
  double pos_error = 0.0;
};

struct PoseRecord {
  int step = 0;
  int robot = 0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  Eigen::Vector3d truth = Eigen::Vector3d::Zero();
};

/// Everything one run produces: per-step post-round estimates against
/// ground truth, plus exchange and agent logs. Schema version 1; the CSV
/// laid out by write_report is documented in the README.
struct RunReport {
  int schema_version = 1;
  std::string scenario_name;
  uint64_t seed = 0;
  int horizon = 0;
  bool oracle = false;
  std::vector<TargetRecord> targets;  // (step 0..horizon) x robot x tracked target
  std::vector<PoseRecord> poses;      // (step 0..horizon) x robot
  std::vector<nlohmann::json> message_log;
  std::vector<nlohmann::json> agent_log;

  /// Position RMSE over `robot`'s targets at each step.
  std::vector<double> rmse_series(int robot) const;
};

struct RunOptions {
  std::optional<uint64_t> seed_override;
  bool parallel_agents = false;  // OpenMP over agents inside a round
};

/// Full lock-step decentralized run. Errors carry step/robot context.
RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Centralized benchmark: one monolithic graph ingesting every robot's
/// primary factors each step (shared target priors and dynamics counted
/// once), marginals extracted per robot and target from the same world
/// trace as run_scenario.
RunReport centralized_oracle(const ScenarioConfig& config, const RunOptions& options = {});

/// Incremental oracle graph, for per-step comparisons.
class CentralizedOracle {
 public:
  explicit CentralizedOracle(const ScenarioConfig& config);

  /// Adds step k's factors from the trace (all robots).
  void ingest_step(const WorldTrace& trace, int k);

  int current_step() const { return step_; }
  const FactorGraph& graph() const { return graph_; }

  /// Canonical marginal over one target's current instance.
  CanonicalGaussian target_marginal(int target) const;
  CanonicalGaussian targets_marginal(const std::vector<int>& targets) const;
  std::pair<Eigen::Vector3d, Eigen::Matrix3d> pose_estimate(int robot) const;

 private:
  FactorId next_id(FactorOrigin origin, int robot = -1) {
    return FactorId{origin, robot, seq_++};
  }

  const ScenarioConfig* config_ = nullptr;
  TargetDynamics dynamics_;
  int step_ = 0;
  uint32_t seq_ = 0;
  std::set<int> tracked_targets_;  // union over robots
  std::set<std::pair<int, int>> known_landmarks_;  // (robot, landmark)
  FactorGraph graph_;
};

/// Per-step decentralized-vs-oracle deltas over common targets, measured
/// in canonical parameters (relative).
struct OracleCompare {
  struct Record {
    int step = 0;
    int robot = 0;
    int target = 0;
    double rel_diff = 0.0;
    bool gated = false;  // robot held the whole round's information here
  };
  std::vector<Record> records;
  double max_rel_diff = 0.0;        // over all records
  double max_gated_rel_diff = 0.0;  // over gated records (the exactness claim)
  double max_endpoint_disagreement = 0.0;  // post-exchange per-edge agreement
};

/// Runs the decentralized system and the oracle in lockstep on the same
/// trace and compares common-target marginals at exchange steps.
OracleCompare compare_with_oracle(const ScenarioConfig& config, const RunOptions& options = {});

/// Independent Monte-Carlo runs with seeds seed, seed+1, ... When
/// `parallel` is set the runs execute under OpenMP; results are identical
/// to the serial path and ordered by seed either way.
std::vector<RunReport> run_monte_carlo(const ScenarioConfig& config, int n_runs, bool parallel);

/// Average-NEES consistency summary over >= 2 Monte-Carlo runs.
struct NeesSummary {
  int runs = 0;
  int horizon = 0;
  NeesBounds bounds;  // dof 4, N = runs
  struct Entry {
    int robot = 0;
    int target = 0;
    double mean_nees = 0.0;  // averaged over runs and steps
    bool pass = false;
    std::vector<double> per_step_mean;  // averaged over runs, per step
  };
  std::vector<Entry> entries;
  bool all_pass = false;
};
NeesSummary nees_report(const std::vector<RunReport>& reports);

/// Writes report.json, targets.csv, poses.csv, rmse.csv, messages.jsonl
/// and agents.jsonl under `dir` (created if needed). Byte-stable for
/// identical reports.
void write_report(const RunReport& report, const std::string& dir);

/// RMSE/NEES curves as SVG files under `dir`.
void write_run_plots(const RunReport& report, const std::string& dir);
void write_nees_plot(const NeesSummary& summary, const std::string& path);

}  // namespace hetfuse
