#include "hetfuse/fusion.hpp"

#include "hetfuse/errors.hpp"

namespace hetfuse {

nlohmann::json FusionMessage::to_json() const {
  nlohmann::json j;
  j["sender"] = sender;
  j["receiver"] = receiver;
  j["timestep"] = timestep;
  j["marginal"] = marginal.to_json();
  j["provenance"] = std::vector<FactorId>(provenance.begin(), provenance.end());
  return j;
}

FusionMessage FusionMessage::from_json(const nlohmann::json& j) {
  FusionMessage m;
  m.sender = j.at("sender").get<int>();
  m.receiver = j.at("receiver").get<int>();
  m.timestep = j.at("timestep").get<int>();
  m.marginal = CanonicalGaussian::from_json(j.at("marginal"));
  const auto prov = j.at("provenance").get<std::vector<FactorId>>();
  m.provenance.insert(prov.begin(), prov.end());
  return m;
}

FusionMessage prepare_message(const FactorGraph& local_graph, const ChannelFilter& cf, int sender,
                              int receiver, int k) {
  const auto& shared = cf.shared_variables();
  if (shared.empty()) {
    throw ConfigError("no shared targets with neighbor " + std::to_string(receiver));
  }
  FusionMessage msg;
  msg.sender = sender;
  msg.receiver = receiver;
  msg.timestep = k;
  msg.marginal = local_graph.marginal(shared);
  msg.provenance = local_graph.contributing_factors(shared);
  return msg;
}

Factor fuse(const FactorGraph& local_graph, ChannelFilter& cf, const FusionMessage& incoming,
            uint32_t seq) {
  for (const auto& d : incoming.marginal.dims()) {
    if (local_graph.total_dims() == 0 || !local_graph.has_variable(d.owner)) {
      throw DimensionError("incoming marginal references variable " + d.owner.str() +
                           " unknown to the local graph");
    }
    if (!std::binary_search(cf.shared_dims().begin(), cf.shared_dims().end(), d)) {
      throw DimensionError("incoming marginal dim " + d.str() + " is not on this channel");
    }
  }

  const FactorId id{FactorOrigin::FusionResult, incoming.receiver, seq};
  const bool duplicate = cf.has_seen_all(incoming.provenance);
  cf.record_seen(incoming.provenance);
  if (duplicate) {
    return Factor{id, CanonicalGaussian::flat(cf.shared_dims())};
  }
  return Factor{id, divide(incoming.marginal.pad_to(cf.shared_dims()), cf.common())};
}

CanonicalGaussian fused_common(const FusionMessage& msg_a, const FusionMessage& msg_b,
                               const CanonicalGaussian& common) {
  const FusionMessage& lo = msg_a.sender <= msg_b.sender ? msg_a : msg_b;
  const FusionMessage& hi = msg_a.sender <= msg_b.sender ? msg_b : msg_a;
  return divide(multiply(lo.marginal, hi.marginal), common);
}

}  // namespace hetfuse
