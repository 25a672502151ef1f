#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetfuse/canonical.hpp"
#include "hetfuse/factor_graph.hpp"

namespace hetfuse {

/// One end of a channel: either a robot peer or one of the two in-robot
/// modules (for the internal SLAM<->tracking channel).
struct Endpoint {
  enum class Kind : uint8_t { Robot, SlamModule, TrackingModule };
  Kind kind = Kind::Robot;
  int robot = -1;

  static Endpoint peer(int robot) { return {Kind::Robot, robot}; }
  static Endpoint slam_module(int robot) { return {Kind::SlamModule, robot}; }
  static Endpoint tracking_module(int robot) { return {Kind::TrackingModule, robot}; }

  std::string str() const;
  friend bool operator==(const Endpoint& a, const Endpoint& b) {
    return a.kind == b.kind && a.robot == b.robot;
  }
};

/// Channel filter: the running estimate of the information common to two
/// endpoints, over the channel's shared variables. Dividing an outgoing
/// marginal by `common` isolates the sender's novel information, which is
/// what guarantees data is counted not more than once.
///
/// The shared variable set grows over the run (new target-state instances
/// each step; new pose timesteps on the internal channel); `common` is
/// zero-padded over new dims. Shared model knowledge (target priors and
/// per-step dynamics of common targets) is multiplied in through
/// absorb_shared_factor by both endpoints identically, so the two copies
/// of a channel's state stay equal without communicating.
class ChannelFilter {
 public:
  ChannelFilter() = default;
  ChannelFilter(Endpoint a, Endpoint b) : a_(a), b_(b) {}

  const Endpoint& endpoint_a() const { return a_; }
  const Endpoint& endpoint_b() const { return b_; }

  /// Grows the shared variable set; `common` is zero-padded over the new
  /// dims. Throws DimensionError if any variable is already shared.
  void extend_shared(const std::vector<VariableId>& new_vars);

  const std::vector<VariableId>& shared_variables() const { return shared_; }
  const std::vector<DimKey>& shared_dims() const { return shared_dims_; }
  bool shares(const VariableId& v) const;

  /// divide(outgoing_marginal, common): the sender's new information only.
  /// The outgoing marginal must live on (a subset of) the shared dims.
  CanonicalGaussian novel(const CanonicalGaussian& outgoing_marginal) const;

  /// Replaces `common` with the post-exchange marginal (on a tree topology
  /// the post-fusion marginal is exactly the new common pdf).
  void update_common(const CanonicalGaussian& fused_marginal);

  /// Multiplies a factor both endpoints hold by construction (shared
  /// priors, dynamics of common targets) into `common`.
  void absorb_shared_factor(const CanonicalGaussian& potential);

  const CanonicalGaussian& common() const { return common_; }

  /// Message dedup log: ids of factors whose information has crossed this
  /// channel (in either direction).
  bool has_seen_all(const std::set<FactorId>& provenance) const;
  void record_seen(const std::set<FactorId>& provenance);
  const std::set<FactorId>& seen_factors() const { return seen_; }

  nlohmann::json to_json() const;

 private:
  Endpoint a_, b_;
  std::vector<VariableId> shared_;  // sorted
  std::vector<DimKey> shared_dims_;
  CanonicalGaussian common_;
  std::set<FactorId> seen_;
};

/// True when both channel copies carry the same shared set, the same
/// common parameters (to `tol`) and the same message log.
bool cf_states_match(const ChannelFilter& x, const ChannelFilter& y, double tol);

}  // namespace hetfuse
