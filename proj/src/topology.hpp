#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bitsig.hpp"
#include "config.hpp"
#include "rng.hpp"

namespace immunet {

enum class NodeKind : uint8_t { Router, Endpoint, LymphService };

// Static network substrate. Node ids are assigned routers first
// (0..routers-1), then endpoints, then lymph services; patient-zero defaults
// and "lowest id" tie-breaks rely on this layout.
struct Topology {
  struct Node {
    uint32_t id;
    NodeKind kind;
  };

  std::vector<Node> nodes;
  std::vector<std::pair<uint32_t, uint32_t>> edges;  // u < v, lexicographic order
  std::vector<std::vector<uint32_t>> adjacency;      // sorted neighbor ids

  std::vector<uint32_t> endpoint_ids;  // ascending
  std::vector<uint32_t> router_ids;    // ascending
  std::vector<uint32_t> lymph_ids;     // ascending

  uint32_t node_count() const { return static_cast<uint32_t>(nodes.size()); }
  NodeKind kind(uint32_t id) const { return nodes[id].kind; }

  // Next node on a shortest path toward dst; dst itself when current == dst.
  // Ties broken by lowest next-hop id. Precomputed at build time.
  uint32_t next_hop(uint32_t current, uint32_t dst) const;
  uint32_t hop_distance(uint32_t from, uint32_t to) const;  // kUnreachable if disconnected

  // Nearest lymph service by hop count, lowest id on ties; kNone if none.
  uint32_t nearest_lymph(uint32_t from) const;

  // Edge list as text, one "u v" line, ids ascending.
  std::string dump_edges() const;

  static constexpr uint32_t kUnreachable = 0xffffffff;
  static constexpr uint32_t kNone = 0xffffffff;

  std::vector<std::vector<uint32_t>> next_hop_table;   // [src][dst]
  std::vector<std::vector<uint32_t>> distance_table;   // [src][dst]
};

// Random connected router backbone (uniform-attachment spanning tree plus
// extra edges), endpoints and lymph services each attached to one uniformly
// chosen router. Throws ConfigError when the backbone cannot exist.
Topology build_topology(const ScenarioConfig& cfg, RngStream& rng);

// Legitimate content model: a mixture of cluster centers; samples flip each
// center bit independently with the radius probability.
struct SelfModel {
  uint32_t signature_bits = 0;
  double radius = 0.0;
  std::vector<BitSignature> centers;

  BitSignature sample(RngStream& rng) const;
};

SelfModel build_self_model(const ScenarioConfig& cfg, RngStream& rng);

}  // namespace immunet
