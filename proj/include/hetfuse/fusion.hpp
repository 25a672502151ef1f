#pragma once

#include <set>

#include <json.hpp>

#include "hetfuse/channel_filter.hpp"
#include "hetfuse/factor_graph.hpp"

namespace hetfuse {

/// Peer-to-peer fusion payload: the sender's marginal over the channel's
/// shared target dims as of step k, plus the ids of the factors that
/// information came from (the sender's data-set bookkeeping). This is the
/// simulator's wire format; see to_json/from_json.
struct FusionMessage {
  int sender = -1;
  int receiver = -1;
  int timestep = 0;
  CanonicalGaussian marginal;
  std::set<FactorId> provenance;

  nlohmann::json to_json() const;
  static FusionMessage from_json(const nlohmann::json& j);
};

/// Marginal of the local graph over everything shared with `receiver`,
/// with contributing factor ids attached. Throws ConfigError when the
/// channel shares no variables yet.
FusionMessage prepare_message(const FactorGraph& local_graph, const ChannelFilter& cf, int sender,
                              int receiver, int k);

/// The heterogeneous fusion rule: returns a factor over the channel's
/// shared dims with potential divide(incoming.marginal, cf.common), tagged
/// FusionResult. Adding it to the local graph multiplies the local pdf by
/// the sender's novel information while leaving the conditional of all
/// non-mutual variables given the shared targets untouched (no dim outside
/// the shared set is in the factor's scope).
///
/// A message whose provenance the channel has already seen produces a flat
/// factor (duplicate delivery changes nothing). The channel records the
/// message's provenance either way; the caller is responsible for adding
/// the factor to the graph and for updating cf.common to the post-fusion
/// marginal afterwards.
Factor fuse(const FactorGraph& local_graph, ChannelFilter& cf, const FusionMessage& incoming,
            uint32_t seq);

/// Post-fusion common marginal, computed in a fixed association order so
/// both endpoints obtain bit-identical parameters:
/// (lower-endpoint message) * (higher-endpoint message) / common.
CanonicalGaussian fused_common(const FusionMessage& msg_a, const FusionMessage& msg_b,
                               const CanonicalGaussian& common);

}  // namespace hetfuse
