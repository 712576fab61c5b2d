#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "rng.hpp"

using namespace immunet;

TEST_CASE("identical stream triples yield identical draws") {
  RngStream a(99, StreamPurpose::Emission, 12);
  RngStream b(99, StreamPurpose::Emission, 12);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.state_hash() == b.state_hash());
}

TEST_CASE("pinned first outputs never change") {
  // Frozen regression values: the stream derivation is part of the
  // determinism contract, so these numbers are load-bearing.
  RngStream topo(1, StreamPurpose::Topology, 0);
  CHECK(topo.state_hash() == 3782562665494750417ull);
  CHECK(topo.next_u64() == 17410497073856059833ull);
  CHECK(topo.next_u64() == 2910846733479027433ull);
  CHECK(topo.next_u64() == 6635393544908592589ull);

  RngStream tok(1, StreamPurpose::Tokens, 0);
  CHECK(tok.next_u64() == 9663641209428496090ull);

  RngStream em(42, StreamPurpose::Emission, 7);
  CHECK(em.next_u64() == 690616104836726306ull);
  CHECK(em.next_u64() == 6717833942930515158ull);
}

TEST_CASE("distinct purposes and entities give distinct sequences") {
  auto first_draws = [](uint64_t seed, StreamPurpose p, uint64_t entity) {
    RngStream s(seed, p, entity);
    std::vector<uint64_t> v;
    for (int i = 0; i < 4; ++i) v.push_back(s.next_u64());
    return v;
  };

  CHECK(first_draws(1, StreamPurpose::Emission, 0) != first_draws(1, StreamPurpose::Mutation, 0));
  CHECK(first_draws(1, StreamPurpose::Emission, 0) != first_draws(1, StreamPurpose::Emission, 1));
  CHECK(first_draws(1, StreamPurpose::Emission, 0) != first_draws(2, StreamPurpose::Emission, 0));

  // Collision scan: 10^4 (purpose, entity) streams, no repeated first draw.
  std::set<uint64_t> seen;
  for (uint64_t purpose = 1; purpose <= 16; ++purpose) {
    for (uint64_t entity = 0; entity < 625; ++entity) {
      RngStream s;
      s.reseed(7, purpose, entity);
      seen.insert(s.next_u64());
    }
  }
  CHECK(seen.size() == 16u * 625u);
}

TEST_CASE("below stays in range and covers small ranges") {
  RngStream rng(3, StreamPurpose::Scheduling, 0);
  std::set<uint64_t> hits;
  for (int i = 0; i < 2000; ++i) {
    uint64_t v = rng.below(7);
    CHECK(v < 7);
    hits.insert(v);
  }
  CHECK(hits.size() == 7);  // all residues reached
  for (int i = 0; i < 100; ++i) CHECK(rng.below(1) == 0);
}

TEST_CASE("next_unit lies in the half-open unit interval") {
  RngStream rng(4, StreamPurpose::Scheduling, 1);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("bernoulli extremes are exact and interior rates track p") {
  RngStream rng(5, StreamPurpose::Scheduling, 2);
  for (int i = 0; i < 50; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
    CHECK_FALSE(rng.bernoulli(-0.5));
    CHECK(rng.bernoulli(1.5));
  }
  int hits = 0;
  for (int i = 0; i < 20000; ++i) hits += rng.bernoulli(0.3) ? 1 : 0;
  CHECK(hits / 20000.0 == doctest::Approx(0.3).epsilon(0.1));
}

TEST_CASE("rate_count is exact on integers and unbiased on fractions") {
  RngStream rng(6, StreamPurpose::Scheduling, 3);
  for (int i = 0; i < 50; ++i) {
    CHECK(rng.rate_count(0.0) == 0);
    CHECK(rng.rate_count(3.0) == 3);
    CHECK(rng.rate_count(10.0) == 10);
    CHECK(rng.rate_count(-2.0) == 0);
  }
  uint64_t total = 0;
  for (int i = 0; i < 20000; ++i) {
    uint64_t c = rng.rate_count(2.25);
    CHECK(c >= 2);
    CHECK(c <= 3);
    total += c;
  }
  CHECK(total / 20000.0 == doctest::Approx(2.25).epsilon(0.01));
}

TEST_CASE("state_hash distinguishes advanced streams") {
  RngStream a(8, StreamPurpose::Gossip, 0);
  RngStream b(8, StreamPurpose::Gossip, 0);
  CHECK(a.state_hash() == b.state_hash());
  (void)a.next_u64();
  CHECK(a.state_hash() != b.state_hash());
  (void)b.next_u64();
  CHECK(a.state_hash() == b.state_hash());
}
