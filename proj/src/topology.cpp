#include "topology.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace immunet {

uint32_t Topology::next_hop(uint32_t current, uint32_t dst) const {
  if (current >= node_count() || dst >= node_count()) {
    throw std::out_of_range("unknown node id in route lookup");
  }
  return next_hop_table[current][dst];
}

uint32_t Topology::hop_distance(uint32_t from, uint32_t to) const {
  if (from >= node_count() || to >= node_count()) {
    throw std::out_of_range("unknown node id in distance lookup");
  }
  return distance_table[from][to];
}

uint32_t Topology::nearest_lymph(uint32_t from) const {
  uint32_t best = kNone;
  uint32_t best_dist = kUnreachable;
  for (uint32_t id : lymph_ids) {
    uint32_t d = distance_table[from][id];
    if (d < best_dist || (d == best_dist && id < best)) {
      best = id;
      best_dist = d;
    }
  }
  return best_dist == kUnreachable ? kNone : best;
}

std::string Topology::dump_edges() const {
  std::string out;
  for (const auto& [u, v] : edges) {
    out += std::to_string(u);
    out += ' ';
    out += std::to_string(v);
    out += '\n';
  }
  return out;
}

Topology build_topology(const ScenarioConfig& cfg, RngStream& rng) {
  const uint32_t routers = cfg.world.routers;
  const uint32_t endpoints = cfg.world.endpoints;
  const uint32_t lymphs = cfg.world.lymph_services;
  if (routers == 0 && (endpoints > 0 || lymphs > 0)) {
    throw ConfigError({"world.routers: backbone cannot connect hosts without routers"});
  }

  Topology topo;
  const uint32_t total = routers + endpoints + lymphs;
  topo.nodes.reserve(total);
  for (uint32_t i = 0; i < routers; ++i) {
    topo.nodes.push_back({i, NodeKind::Router});
    topo.router_ids.push_back(i);
  }
  for (uint32_t i = 0; i < endpoints; ++i) {
    uint32_t id = routers + i;
    topo.nodes.push_back({id, NodeKind::Endpoint});
    topo.endpoint_ids.push_back(id);
  }
  for (uint32_t i = 0; i < lymphs; ++i) {
    uint32_t id = routers + endpoints + i;
    topo.nodes.push_back({id, NodeKind::LymphService});
    topo.lymph_ids.push_back(id);
  }

  std::set<std::pair<uint32_t, uint32_t>> edge_set;
  auto add_edge = [&edge_set](uint32_t a, uint32_t b) {
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    return edge_set.insert({a, b}).second;
  };

  // Spanning tree over routers by uniform attachment, then extra edges for
  // redundancy. Failed extra-edge draws (self loop or duplicate) are simply
  // skipped so the draw count stays fixed.
  for (uint32_t i = 1; i < routers; ++i) {
    add_edge(i, static_cast<uint32_t>(rng.below(i)));
  }
  if (routers >= 2) {
    for (uint32_t i = 0; i < cfg.world.extra_router_edges; ++i) {
      uint32_t u = static_cast<uint32_t>(rng.below(routers));
      uint32_t v = static_cast<uint32_t>(rng.below(routers));
      add_edge(u, v);
    }
  }
  for (uint32_t id : topo.endpoint_ids) {
    add_edge(id, static_cast<uint32_t>(rng.below(routers)));
  }
  for (uint32_t id : topo.lymph_ids) {
    add_edge(id, static_cast<uint32_t>(rng.below(routers)));
  }

  topo.edges.assign(edge_set.begin(), edge_set.end());
  topo.adjacency.assign(total, {});
  for (const auto& [u, v] : topo.edges) {
    topo.adjacency[u].push_back(v);
    topo.adjacency[v].push_back(u);
  }
  for (auto& nbrs : topo.adjacency) std::sort(nbrs.begin(), nbrs.end());

  // All-pairs shortest hops by BFS from every destination. For each source the
  // chosen next hop is the lowest-id neighbor one step closer to dst.
  topo.distance_table.assign(total, std::vector<uint32_t>(total, Topology::kUnreachable));
  topo.next_hop_table.assign(total, std::vector<uint32_t>(total, Topology::kNone));
  std::deque<uint32_t> queue;
  for (uint32_t dst = 0; dst < total; ++dst) {
    auto& dist = topo.distance_table[dst];  // distance TO dst, symmetric graph
    dist[dst] = 0;
    queue.clear();
    queue.push_back(dst);
    while (!queue.empty()) {
      uint32_t u = queue.front();
      queue.pop_front();
      for (uint32_t v : topo.adjacency[u]) {
        if (dist[v] == Topology::kUnreachable) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (uint32_t src = 0; src < total; ++src) {
      if (src == dst) {
        topo.next_hop_table[src][dst] = dst;
        continue;
      }
      if (dist[src] == Topology::kUnreachable) continue;
      for (uint32_t v : topo.adjacency[src]) {  // ascending: first hit is lowest id
        if (dist[v] + 1 == dist[src]) {
          topo.next_hop_table[src][dst] = v;
          break;
        }
      }
    }
  }
  // distance_table was filled per destination; transpose view is identical on
  // an undirected graph, so rows already serve as per-source distances.
  return topo;
}

BitSignature SelfModel::sample(RngStream& rng) const {
  const BitSignature& center = centers[rng.below(centers.size())];
  BitSignature out = center;
  if (radius > 0.0) {
    for (uint32_t i = 0; i < signature_bits; ++i) {
      if (rng.bernoulli(radius)) out.flip_bit(i);
    }
  }
  return out;
}

SelfModel build_self_model(const ScenarioConfig& cfg, RngStream& rng) {
  SelfModel model;
  model.signature_bits = cfg.world.signature_bits;
  model.radius = cfg.self.radius;
  model.centers.reserve(cfg.self.clusters);
  for (uint32_t c = 0; c < cfg.self.clusters; ++c) {
    BitSignature center(cfg.world.signature_bits);
    for (uint32_t i = 0; i < cfg.world.signature_bits; ++i) {
      center.set_bit(i, rng.bernoulli(0.5));
    }
    model.centers.push_back(std::move(center));
  }
  return model;
}

}  // namespace immunet
