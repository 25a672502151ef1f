#pragma once

#include <random>
#include <vector>

#include <json.hpp>

namespace hetfuse {

struct TopologyEdge {
  int a = 0;
  int b = 0;
  int period = 1;
};

/// Peer-to-peer communication topology: nodes are robot ids, edges are
/// undirected channels with a per-edge exchange period in steps.
struct Topology {
  int nodes = 0;
  std::vector<TopologyEdge> edges;
};

/// Accepts trees and forests; rejects duplicate edges and, because exact
/// channel-filter bookkeeping assumes an acyclic network, any cycle. The
/// error names the offending cycle. Throws ConfigError.
void validate_topology(const Topology& topo);

/// Edges due for an exchange at step k (k > 0), sorted by (a, b) so rounds
/// are deterministic.
std::vector<TopologyEdge> edges_due(const Topology& topo, int k);

class RobotAgent;

/// Executes the exchange phase of round k: every due edge, in sorted
/// order, runs a synchronous bidirectional exchange (unless dropped, when
/// drop_prob > 0). All agents must already be at step k.
void run_schedule(std::vector<RobotAgent>& agents, const Topology& topo, int k,
                  std::mt19937_64& drop_rng, double drop_prob,
                  std::vector<nlohmann::json>* message_log = nullptr);

}  // namespace hetfuse
