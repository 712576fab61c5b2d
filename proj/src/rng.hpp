#pragma once

#include <cmath>
#include <cstdint>

namespace immunet {

// All randomness in a run flows through named streams derived from the run
// seed. Stream construction:
//
//   state = splitmix64_mix(seed)
//   state ^= purpose * 0xa24baed4963ee407
//   state = splitmix64_mix(state)
//   state ^= entity * 0x9fb21c651e98df25
//   s[0..3] = four successive splitmix64 outputs of state
//
// The four outputs seed an xoshiro256** generator. Identical (seed, purpose,
// entity) triples always yield identical streams, and distinct triples yield
// independent ones, so simulation phases can draw in any internal order
// without perturbing each other. Uniform ranges use rejection sampling and
// bernoulli uses a 53-bit unit draw; none of this goes through <random>
// distributions, whose outputs are not pinned across standard libraries.

inline uint64_t splitmix64_next(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

enum class StreamPurpose : uint64_t {
  Topology = 1,       // backbone wiring, host attachment
  Toolbox = 2,        // self/nonself segment toolbox
  SelfModel = 3,      // self cluster centres
  SelfTraining = 4,   // censoring training samples
  Repertoire = 5,     // per-host detector generation (entity = host id)
  LegitTraffic = 6,   // per-endpoint benign sends (entity = host id)
  Emission = 7,       // per-host malicious sends (entity = host id)
  Mutation = 8,       // genome mutation (entity = host id)
  Infection = 9,      // per-host infection rolls (entity = host id)
  Maturation = 10,    // per-lymph clone mutation (entity = node id)
  Gossip = 11,        // per-node share decisions (entity = node id)
  Securityware = 12,  // per-host push targeting/acceptance (entity = host id)
  Adoption = 13,      // initial adopter assignment
  Tokens = 14,        // scenario auth secret, spam mask
  Scheduling = 15,    // reserved for tie randomisation (unused by default)
  Strain = 16,        // root genome draw
};

class RngStream {
 public:
  RngStream() { reseed(0, 0, 0); }
  RngStream(uint64_t seed, StreamPurpose purpose, uint64_t entity) {
    reseed(seed, static_cast<uint64_t>(purpose), entity);
  }

  void reseed(uint64_t seed, uint64_t purpose, uint64_t entity) {
    uint64_t st = seed;
    (void)splitmix64_next(st);
    st ^= purpose * 0xa24baed4963ee407ull;
    (void)splitmix64_next(st);
    st ^= entity * 0x9fb21c651e98df25ull;
    for (auto& w : s_) w = splitmix64_next(st);
    // xoshiro256** is undefined on the all-zero state; unreachable in
    // practice, guarded anyway.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  uint64_t next_u64() {
    uint64_t result = rotl(s_[1] * 5, 7) * 9;
    uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n), unbiased via rejection. n must be nonzero.
  uint64_t below(uint64_t n) {
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return next_unit() < p;
  }

  // Integer count for a fractional per-step rate: floor(rate) plus a
  // bernoulli on the remainder, so the mean equals the rate exactly.
  uint64_t rate_count(double rate) {
    if (rate <= 0.0) return 0;
    double whole = std::floor(rate);
    uint64_t n = static_cast<uint64_t>(whole);
    if (bernoulli(rate - whole)) ++n;
    return n;
  }

  uint64_t state_hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint64_t w : s_) {
      for (int b = 0; b < 8; ++b) {
        h ^= (w >> (8 * b)) & 0xff;
        h *= 0x100000001b3ull;
      }
    }
    return h;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace immunet
