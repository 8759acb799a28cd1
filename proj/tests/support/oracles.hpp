#pragma once

// Test-only reference models. None of these call into the code under test
// beyond plain data types.

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "loraflood/scenario.hpp"
#include "loraflood/simulation.hpp"

namespace loraflood::testing {

/// Varint bytes by repeated division, no shifts or masks.
inline std::vector<std::uint8_t> oracle_varint(std::uint64_t value) {
  std::vector<std::uint8_t> out;
  do {
    std::uint64_t group = value % 128;
    value /= 128;
    if (value != 0) group += 128;
    out.push_back(static_cast<std::uint8_t>(group));
  } while (value != 0);
  return out;
}

/// BFS hop distances from `origin` over enabled links.
inline std::map<DeviceId, int> oracle_bfs(const Scenario& scenario, DeviceId origin) {
  std::map<DeviceId, std::vector<DeviceId>> adjacency;
  for (const Link& link : scenario.links) {
    if (!link.enabled) continue;
    adjacency[link.a].push_back(link.b);
    adjacency[link.b].push_back(link.a);
  }
  std::map<DeviceId, int> distance{{origin, 0}};
  std::queue<DeviceId> frontier;
  frontier.push(origin);
  while (!frontier.empty()) {
    const DeviceId at = frontier.front();
    frontier.pop();
    for (DeviceId next : adjacency[at]) {
      if (distance.emplace(next, distance[at] + 1).second) frontier.push(next);
    }
  }
  return distance;
}

struct DutyViolation {
  DeviceId sender;
  std::int64_t window_start_us;
  std::int64_t used_us;
};

/// Brute-force sliding-window replay: for each sender, every window of
/// `window_us` that starts at a transmission start or ends at a transmission
/// end is summed by interval overlap and compared against `budget_us`.
inline std::vector<DutyViolation> oracle_duty_replay(const std::vector<TransmissionRecord>& txs,
                                                     std::int64_t window_us,
                                                     std::int64_t budget_us) {
  std::map<DeviceId, std::vector<std::pair<std::int64_t, std::int64_t>>> by_sender;
  for (const auto& tx : txs) {
    by_sender[tx.event.sender].emplace_back(tx.event.start.count(), tx.event.end().count());
  }
  std::vector<DutyViolation> violations;
  for (auto& [sender, intervals] : by_sender) {
    std::vector<std::int64_t> window_starts;
    for (auto [s, e] : intervals) {
      window_starts.push_back(s);
      window_starts.push_back(e - window_us);
    }
    for (std::int64_t w : window_starts) {
      std::int64_t used = 0;
      for (auto [s, e] : intervals) {
        const std::int64_t lo = std::max(s, w);
        const std::int64_t hi = std::min(e, w + window_us);
        if (hi > lo) used += hi - lo;
      }
      if (used > budget_us) violations.push_back({sender, w, used});
    }
  }
  return violations;
}

/// Random connected graph: a random spanning tree plus extra edges.
inline Scenario random_connected_scenario(std::mt19937_64& rng, int node_count, double extra_edge_p) {
  Scenario s;
  s.name = "random";
  for (int i = 1; i <= node_count; ++i) {
    NodeSpec node;
    node.id = static_cast<DeviceId>(i);
    node.name = "node-" + std::to_string(i);
    node.role = i == 1 ? MeshRole::MPP : MeshRole::MP;
    node.sensor_type = i == 1 ? "" : "temperature";
    s.nodes.push_back(node);
  }
  std::set<std::pair<DeviceId, DeviceId>> edges;
  for (int i = 2; i <= node_count; ++i) {
    std::uniform_int_distribution<int> parent(1, i - 1);
    edges.emplace(static_cast<DeviceId>(parent(rng)), static_cast<DeviceId>(i));
  }
  std::bernoulli_distribution extra(extra_edge_p);
  for (int a = 1; a <= node_count; ++a) {
    for (int b = a + 1; b <= node_count; ++b) {
      if (extra(rng)) edges.emplace(static_cast<DeviceId>(a), static_cast<DeviceId>(b));
    }
  }
  for (auto [a, b] : edges) s.links.push_back({a, b, 0.0, true});
  s.gateway = 1;
  return s;
}

/// Node 1 at the centre, nodes 2..n linked only to it.
inline Scenario star_scenario(int node_count, double p_err = 0.0) {
  Scenario s;
  s.name = "star";
  for (int i = 1; i <= node_count; ++i) {
    NodeSpec node;
    node.id = static_cast<DeviceId>(i);
    node.name = "node-" + std::to_string(i);
    node.role = i == 1 ? MeshRole::MPP : MeshRole::MP;
    node.sensor_type = i == 1 ? "" : "temperature";
    node.ap_clients = static_cast<std::uint32_t>(i);
    s.nodes.push_back(node);
    if (i > 1) s.links.push_back({1, static_cast<DeviceId>(i), p_err, true});
  }
  s.gateway = 1;
  return s;
}

/// Nodes 1..n in a chain.
inline Scenario line_scenario(int node_count, double p_err = 0.0) {
  Scenario s = star_scenario(node_count, p_err);
  s.name = "line";
  s.links.clear();
  for (int i = 1; i < node_count; ++i) {
    s.links.push_back({static_cast<DeviceId>(i), static_cast<DeviceId>(i + 1), p_err, true});
  }
  return s;
}

/// Zero link loss and no receiver-side collisions.
inline Scenario lossless(Scenario s) {
  for (Link& link : s.links) link.p_err = 0.0;
  s.radio.collisions = false;
  return s;
}

}  // namespace loraflood::testing
