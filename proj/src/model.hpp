#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bitsig.hpp"
#include "detector.hpp"
#include "topology.hpp"

namespace immunet {

// Ground-truth class, readable only by metrics, threat mechanics and the
// label-leak audit. Defense code never sees this field (see PacketView).
enum class PacketClass : uint8_t { Legit, Spam, Malware, Securityware, Control };

enum class ControlKind : uint8_t { None, DetectorShare, AntigenCapture, AlertReport };

// Wire-level port tag. Legit and malicious traffic both use the open port
// (which is what makes a barrier weak on its own); control traffic uses the
// service port.
enum class Port : uint8_t { Open, Service };

struct Packet {
  uint64_t id = 0;
  uint32_t src = 0;
  uint32_t dst = 0;
  uint32_t at = 0;  // current node while in flight
  uint32_t hops_remaining = 0;

  BitSignature payload;
  Port port = Port::Open;
  uint64_t token = 0;  // 0 = no token
  ControlKind control = ControlKind::None;
  bool installer = false;             // securityware install offer
  std::vector<Detector> carried;      // detector shares / securityware payload
  uint32_t alert_suspect = 0;         // AlertReport target host

  PacketClass klass = PacketClass::Legit;  // ground truth; scoring only
  uint32_t strain = 0;                     // ground truth for Malware/Spam
};

// What a defense layer is allowed to inspect: everything on the wire except
// the ground-truth class and strain. Constructed by the engine at each
// interception point; keeping klass out of this struct makes label leaks a
// compile error rather than a discipline.
struct PacketView {
  uint32_t src;
  uint32_t dst;
  const BitSignature& payload;
  Port port;
  uint64_t token;
  ControlKind control;
  bool installer;
};

inline PacketView view_of(const Packet& p) {
  return PacketView{p.src, p.dst, p.payload, p.port, p.token, p.control, p.installer};
}

enum class HostState : uint8_t { Clean, Infected, Quarantined };

struct Adoption {
  bool barrier = false;
  bool blacklist = false;   // subscribes to the block list
  bool scanner = false;     // runs the detector repertoire on delivery
  bool securityware = false;  // pushes installs to other endpoints
};

struct Host {
  uint32_t id = 0;
  NodeKind kind = NodeKind::Endpoint;
  double vulnerability = 0.0;
  Adoption adopts;

  HostState state = HostState::Clean;
  uint32_t strain = 0;
  bool strain_active = false;  // carries a live strain (survives into quarantine)
  uint64_t quarantine_until = 0;
  uint64_t infected_since = 0;

  // Emission counts over the last regulation-window steps (damage signal).
  std::vector<uint32_t> emission_ring;
  uint32_t ring_pos = 0;

  std::optional<Repertoire> repertoire;

  // Recently captured antigen hashes, to avoid re-reporting the same content
  // every step.
  std::vector<uint64_t> recent_captures;

  bool infected() const { return state == HostState::Infected; }

  uint32_t damage_level() const {
    uint32_t sum = 0;
    for (uint32_t v : emission_ring) sum += v;
    return sum;
  }

  void note_emissions(uint32_t count) {
    if (!emission_ring.empty()) emission_ring[ring_pos] += count;
  }

  void rotate_emission_ring() {
    if (emission_ring.empty()) return;
    ring_pos = (ring_pos + 1) % emission_ring.size();
    emission_ring[ring_pos] = 0;
  }

  bool remembers_capture(uint64_t hash) const {
    for (uint64_t h : recent_captures) {
      if (h == hash) return true;
    }
    return false;
  }

  void remember_capture(uint64_t hash, uint32_t cap) {
    if (cap == 0) return;
    if (recent_captures.size() >= cap) {
      recent_captures.erase(recent_captures.begin());
    }
    recent_captures.push_back(hash);
  }
};

}  // namespace immunet
