#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetfuse/canonical.hpp"
#include "hetfuse/dims.hpp"

namespace hetfuse {

/// Where a factor came from. Provenance stands in for membership of the
/// per-module data sets: primary data (measurements, odometry, priors,
/// dynamics, fusion results) versus derived inter-module transfers
/// (PoseFromSlam / PoseFromTracking), which must never be counted as
/// independent data.
enum class FactorOrigin : uint8_t {
  LocalMeasurement,
  Odometry,
  Prior,
  Dynamics,
  PoseFromSlam,
  PoseFromTracking,
  FusionResult,
};

const char* to_string(FactorOrigin o);
FactorOrigin factor_origin_from_string(const std::string& s);

/// True for factors that carry primary data (their information exists
/// nowhere else); false for the derived inter-module pose transfers.
inline bool is_primary_origin(FactorOrigin o) {
  return o != FactorOrigin::PoseFromSlam && o != FactorOrigin::PoseFromTracking;
}

struct FactorId {
  FactorOrigin origin = FactorOrigin::Prior;
  int32_t source_robot = -1;  // -1 for a centralized/builder context
  uint32_t seq = 0;

  friend bool operator==(const FactorId& a, const FactorId& b) {
    return a.origin == b.origin && a.source_robot == b.source_robot && a.seq == b.seq;
  }
  friend bool operator<(const FactorId& a, const FactorId& b) {
    if (a.source_robot != b.source_robot) return a.source_robot < b.source_robot;
    if (a.origin != b.origin) return a.origin < b.origin;
    return a.seq < b.seq;
  }
  std::string str() const;
};

void to_json(nlohmann::json& j, const FactorId& id);
void from_json(const nlohmann::json& j, FactorId& id);

struct Factor {
  FactorId id;
  CanonicalGaussian potential;

  /// Owners of the potential's dims, sorted, deduplicated.
  std::vector<VariableId> scope() const;
};

/// Bipartite variable/factor graph whose factor product is proportional to
/// the joint pdf. The graph is only an organized factorization: marginals
/// are defined as marginalize(joint) and the two routes below are kept
/// equal by the test suite.
class FactorGraph {
 public:
  void add_variable(const VariableId& id);
  bool has_variable(const VariableId& id) const;
  const std::vector<VariableId>& variables() const { return variables_; }

  /// Registers the factor; scope variables must already exist.
  void add_factor(Factor f);
  /// Removes a factor by id (used by permutation/restore tests).
  Factor remove_factor(const FactorId& id);
  const std::vector<Factor>& factors() const { return factors_; }
  const Factor* find_factor(const FactorId& id) const;

  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_factors() const { return factors_.size(); }
  /// Total scalar dims over all variables.
  int total_dims() const { return total_dims_; }

  /// Product of all factor potentials, zero-padded to the full dim set.
  /// Cached; invalidated by mutation.
  const CanonicalGaussian& joint() const;

  /// Marginal over `vars` via structure-aware variable elimination in
  /// canonical (time-major) order. Equal to marginal_reference() to
  /// rounding, at a small fraction of the cost on chain-structured graphs.
  CanonicalGaussian marginal(const std::vector<VariableId>& vars) const;

  /// Serial reference route: materialize the dense joint, one Schur
  /// elimination of everything not kept.
  CanonicalGaussian marginal_reference(const std::vector<VariableId>& vars) const;

  /// Factor ids reachable from `vars` through variable-factor adjacency
  /// (the provenance of any marginal over them).
  std::set<FactorId> contributing_factors(const std::vector<VariableId>& vars) const;

  nlohmann::json to_json() const;

 private:
  std::vector<DimKey> check_vars(const std::vector<VariableId>& vars) const;

  std::vector<VariableId> variables_;  // sorted canonically
  std::vector<Factor> factors_;
  int total_dims_ = 0;
  mutable std::optional<CanonicalGaussian> joint_cache_;
};

/// Partition of one robot's variable set: per-neighbor common sets, local
/// variables nobody else monitors, and the derived non-mutual remainder.
/// Targets are partitioned at whole-target granularity; the per-timestep
/// variable instances inherit the owning target's class.
class VariablePartition {
 public:
  VariablePartition() = default;
  VariablePartition(int robot, std::set<int> own_targets,
                    std::map<int, std::set<int>> neighbor_targets);

  int robot() const { return robot_; }
  const std::set<int>& own_targets() const { return own_targets_; }
  const std::map<int, std::set<int>>& neighbors() const { return common_; }

  /// chi^{ij}_C at target granularity: targets shared with neighbor j.
  const std::set<int>& common_targets(int neighbor) const;
  /// chi^i_L at target granularity: targets no neighbor monitors.
  std::set<int> local_targets() const;
  /// T^{i\j}: targets monitored by this robot, possibly others, but not j.
  std::set<int> non_mutual_targets(int neighbor) const;

  bool is_common_with(int target, int neighbor) const;

 private:
  int robot_ = -1;
  std::set<int> own_targets_;
  std::map<int, std::set<int>> common_;  // neighbor -> shared target ids
};

}  // namespace hetfuse
