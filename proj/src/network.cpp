#include "hetfuse/network.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>

#include "hetfuse/errors.hpp"
#include "hetfuse/robot_agent.hpp"

namespace hetfuse {

namespace {

// Walks parent links to spell out the cycle closed by edge (a, b).
std::string cycle_string(int a, int b, const std::map<int, int>& parent) {
  std::string s = std::to_string(b);
  int cur = a;
  while (cur != -1) {
    s = std::to_string(cur) + "-" + s;
    if (cur == b) break;
    auto it = parent.find(cur);
    cur = it == parent.end() ? -1 : it->second;
  }
  return s;
}

}  // namespace

void validate_topology(const Topology& topo) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(topo.nodes));
  std::vector<std::pair<int, int>> seen;
  for (const auto& e : topo.edges) {
    if (e.a < 0 || e.b < 0 || e.a >= topo.nodes || e.b >= topo.nodes || e.a == e.b) {
      throw ConfigError("invalid edge " + std::to_string(e.a) + "-" + std::to_string(e.b));
    }
    const std::pair<int, int> key{std::min(e.a, e.b), std::max(e.a, e.b)};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError("duplicate edge " + std::to_string(e.a) + "-" + std::to_string(e.b));
    }
    seen.push_back(key);
    adj[static_cast<std::size_t>(e.a)].push_back(e.b);
    adj[static_cast<std::size_t>(e.b)].push_back(e.a);
  }

  // DFS forest; a visited non-parent neighbor closes a cycle.
  std::vector<int> state(static_cast<std::size_t>(topo.nodes), 0);
  std::map<int, int> parent;
  for (int root = 0; root < topo.nodes; ++root) {
    if (state[static_cast<std::size_t>(root)] != 0) continue;
    std::vector<int> stack = {root};
    parent[root] = -1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (state[static_cast<std::size_t>(v)] != 0) continue;
      state[static_cast<std::size_t>(v)] = 1;
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (w == parent[v]) continue;
        if (state[static_cast<std::size_t>(w)] != 0) {
          throw ConfigError("communication topology has cycle " + cycle_string(v, w, parent) +
                            "; exact mode requires a tree or forest");
        }
        parent[w] = v;
        stack.push_back(w);
      }
    }
  }
}

void run_schedule(std::vector<RobotAgent>& agents, const Topology& topo, int k,
                  std::mt19937_64& drop_rng, double drop_prob,
                  std::vector<nlohmann::json>* message_log) {
  for (const auto& agent : agents) {
    if (agent.current_step() != k) {
      throw Error("run_schedule at step " + std::to_string(k) + " but agent " +
                  std::to_string(agent.id()) + " is at step " +
                  std::to_string(agent.current_step()));
    }
  }
  for (const auto& e : edges_due(topo, k)) {
    if (drop_prob > 0.0) {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      if (coin(drop_rng) < drop_prob) {
        if (message_log) {
          message_log->push_back({{"step", k}, {"edge", {e.a, e.b}}, {"dropped", true}});
        }
        continue;
      }
    }
    exchange_pair(agents[static_cast<std::size_t>(std::min(e.a, e.b))],
                  agents[static_cast<std::size_t>(std::max(e.a, e.b))], k, message_log);
  }
}

std::vector<TopologyEdge> edges_due(const Topology& topo, int k) {
  std::vector<TopologyEdge> due;
  if (k <= 0) return due;
  for (const auto& e : topo.edges) {
    if (k % e.period == 0) due.push_back(e);
  }
  std::sort(due.begin(), due.end(), [](const TopologyEdge& x, const TopologyEdge& y) {
    return std::tuple(std::min(x.a, x.b), std::max(x.a, x.b)) <
           std::tuple(std::min(y.a, y.b), std::max(y.a, y.b));
  });
  return due;
}

}  // namespace hetfuse
