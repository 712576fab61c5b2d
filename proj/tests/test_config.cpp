#include <string>
#include <vector>

#include "config.hpp"
#include "doctest.h"
#include "rng.hpp"

using namespace immunet;

TEST_CASE("empty text parses to the documented defaults") {
  ScenarioConfig cfg = ScenarioConfig::parse("");
  CHECK(cfg == ScenarioConfig{});
  CHECK(cfg.world.signature_bits == 64);
  CHECK(cfg.world.endpoints == 200);
  CHECK(cfg.world.routers == 20);
  CHECK(cfg.world.vulnerability == 0.8);
  CHECK(cfg.traffic.legit_rate == 1.0);
  CHECK(cfg.strain.fanout == 2.0);
  CHECK(cfg.strain.genome == "random");
  CHECK(cfg.defense.architectures.empty());
  CHECK(cfg.defense.detector.match_radius == 14);
  CHECK(cfg.defense.regulation.mode == RegulationMode::TwoSignal);
  CHECK(cfg.run.horizon == 500);
  CHECK(cfg.run.patient_zero == -1);

  // Comment-only and whitespace-only text is equally empty.
  CHECK(ScenarioConfig::parse("# nothing here\n\n   \n") == ScenarioConfig{});
}

TEST_CASE("values, comments and whitespace parse") {
  ScenarioConfig cfg = ScenarioConfig::parse(
      "world.L = 32            # trailing comment\n"
      "  world.endpoints=50\n"
      "strain.mutation_rate = 0.0625\n"
      "defense.architectures = [endpoint, router_filter]\n"
      "defense.regulation.mode = one_signal\n"
      "run.patient_zero = 25\n");  // endpoints occupy ids 20..69 here
  CHECK(cfg.world.signature_bits == 32);
  CHECK(cfg.world.endpoints == 50);
  CHECK(cfg.strain.mutation_rate == 0.0625);
  CHECK(cfg.defense.architectures ==
        std::vector<Architecture>{Architecture::Endpoint, Architecture::RouterFilter});
  CHECK(cfg.has(Architecture::Endpoint));
  CHECK(cfg.has(Architecture::RouterFilter));
  CHECK_FALSE(cfg.has(Architecture::Barrier));
  CHECK(cfg.defense.regulation.mode == RegulationMode::OneSignal);
  CHECK(cfg.run.patient_zero == 25);
}

TEST_CASE("architecture list forms") {
  CHECK(ScenarioConfig::parse("defense.architectures = none\n").defense.architectures.empty());
  CHECK(ScenarioConfig::parse("defense.architectures = []\n").defense.architectures.empty());
  CHECK(ScenarioConfig::parse("defense.architectures = barrier\n").defense.architectures ==
        std::vector<Architecture>{Architecture::Barrier});
  CHECK(ScenarioConfig::parse("defense.architectures = blacklist,p2p_securityware\n")
            .defense.architectures ==
        std::vector<Architecture>{Architecture::Blacklist, Architecture::P2pSecurityware});

  CHECK_THROWS_AS(ScenarioConfig::parse("defense.architectures = [barrier, barrier]\n"),
                  ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse("defense.architectures = fortress\n"), ConfigError);
}

TEST_CASE("every parse problem is reported with its line number") {
  try {
    ScenarioConfig::parse(
        "world.L = 32\n"
        "world.bogus = 1\n"
        "not a key value line\n"
        "world.endpoints = ten\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.issues().size() == 3);
    CHECK(e.issues()[0].find("line 2") != std::string::npos);
    CHECK(e.issues()[0].find("world.bogus") != std::string::npos);
    CHECK(e.issues()[1].find("line 3") != std::string::npos);
    CHECK(e.issues()[2].find("line 4") != std::string::npos);
    CHECK(e.issues()[2].find("world.endpoints") != std::string::npos);
  }
}

TEST_CASE("semantic validation names every violated field") {
  ScenarioConfig cfg;
  cfg.world.signature_bits = 0;
  cfg.world.vulnerability = 1.5;
  cfg.defense.blacklist.threshold = 0;
  cfg.run.ttl = 0;
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    auto has_issue_for = [&](const std::string& key) {
      for (const auto& issue : e.issues()) {
        if (issue.find(key) != std::string::npos) return true;
      }
      return false;
    };
    CHECK(has_issue_for("world.L"));
    CHECK(has_issue_for("world.vulnerability"));
    CHECK(has_issue_for("defense.blacklist.threshold"));
    CHECK(has_issue_for("run.ttl"));
    CHECK(e.issues().size() >= 4);
  }
}

TEST_CASE("single-field semantic errors") {
  CHECK_THROWS_AS(ScenarioConfig::parse("world.L = 0\n"), ConfigError);
  // segment width must divide L
  CHECK_THROWS_AS(ScenarioConfig::parse("world.L = 30\n"), ConfigError);
  // radius above L
  CHECK_THROWS_AS(ScenarioConfig::parse("world.L = 8\ndefense.detector.match_radius = 9\n"),
                  ConfigError);
  // genome length must be L/4 digits
  CHECK_THROWS_AS(ScenarioConfig::parse("strain.genome = ff\n"), ConfigError);
  CHECK_NOTHROW(ScenarioConfig::parse("strain.genome = 0123456789abcdef\n"));
  // patient zero must be an endpoint id
  CHECK_THROWS_AS(ScenarioConfig::parse("run.patient_zero = 3\n"), ConfigError);  // a router
  CHECK_NOTHROW(ScenarioConfig::parse("run.patient_zero = 20\n"));  // first endpoint
  CHECK_THROWS_AS(ScenarioConfig::parse("defense.lymph.survivors = 99\n"), ConfigError);
}

TEST_CASE("set and get work per key") {
  ScenarioConfig cfg;
  cfg.set("world.L", "32");
  CHECK(cfg.world.signature_bits == 32);
  CHECK(cfg.get("world.L") == "32");
  cfg.set("strain.infectivity", "0.25");
  CHECK(cfg.strain.infectivity == 0.25);
  CHECK(cfg.get("strain.infectivity") == "0.25");
  cfg.set("defense.architectures", "[endpoint]");
  CHECK(cfg.get("defense.architectures") == "[endpoint]");
  cfg.set("defense.architectures", "none");
  CHECK(cfg.get("defense.architectures") == "none");
  cfg.set("world.routers_infectable", "true");
  CHECK(cfg.world.routers_infectable);
  CHECK(cfg.get("world.routers_infectable") == "true");

  CHECK_THROWS_AS(cfg.set("world.no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(cfg.get("world.no_such_key"), ConfigError);
  CHECK_THROWS_AS(cfg.set("world.L", "banana"), ConfigError);

  // set() alone skips semantic validation; validate() catches it later.
  CHECK_NOTHROW(cfg.set("world.L", "0"));
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("serialize parse round trip on defaults and edits") {
  ScenarioConfig cfg;
  CHECK(ScenarioConfig::parse(cfg.serialize()) == cfg);

  cfg.set("world.L", "32");
  cfg.set("defense.architectures", "[barrier, blacklist, endpoint, router_filter, p2p_securityware]");
  cfg.set("strain.genome", "deadbeef");
  cfg.set("strain.mutation_rate", "0.03125");
  cfg.set("defense.regulation.mode", "one_signal");
  cfg.set("run.patient_zero", "25");
  cfg.validate();
  CHECK(ScenarioConfig::parse(cfg.serialize()) == cfg);
}

TEST_CASE("serialize parse round trip on randomized valid configs") {
  RngStream rng(2024, StreamPurpose::Scheduling, 9);
  const char* archs[] = {"none", "[barrier]", "[endpoint]", "[router_filter]",
                         "[endpoint, p2p_securityware]",
                         "[barrier, blacklist, endpoint, router_filter, p2p_securityware]"};
  for (int trial = 0; trial < 100; ++trial) {
    ScenarioConfig cfg;
    uint32_t L = 8u * (1 + (uint32_t)rng.below(16));  // 8..128, divisible by 8
    cfg.world.signature_bits = L;
    cfg.world.endpoints = 1 + (uint32_t)rng.below(300);
    cfg.world.routers = 1 + (uint32_t)rng.below(30);
    cfg.world.extra_router_edges = (uint32_t)rng.below(20);
    cfg.world.lymph_services = (uint32_t)rng.below(3);
    cfg.world.vulnerability = rng.next_unit();
    cfg.world.routers_infectable = rng.bernoulli(0.5);
    cfg.self.clusters = 1 + (uint32_t)rng.below(8);
    cfg.self.radius = rng.next_unit() * 0.2;
    cfg.self.training_samples = (uint32_t)rng.below(100);
    cfg.traffic.legit_rate = rng.next_unit() * 3;
    cfg.traffic.spam_multiplier = rng.next_unit() * 12;
    cfg.strain.mutation_rate = rng.next_unit() * 0.1;
    cfg.strain.fanout = rng.next_unit() * 4;
    cfg.strain.infectivity = rng.next_unit();
    cfg.strain.malware_fraction = rng.next_unit();
    cfg.strain.initial_prevalence = rng.next_unit();
    cfg.defense.detector.match_radius = 1 + (uint32_t)rng.below(L);
    cfg.defense.detector.segment_bits = 8;
    cfg.defense.lymph.fragment_bits = 1 + (uint32_t)rng.below(L);
    cfg.defense.lymph.clones = 1 + (uint32_t)rng.below(40);
    cfg.defense.lymph.survivors = 1 + (uint32_t)rng.below(cfg.defense.lymph.clones);
    cfg.defense.gossip.probability = rng.next_unit();
    cfg.defense.regulation.mode =
        rng.bernoulli(0.5) ? RegulationMode::OneSignal : RegulationMode::TwoSignal;
    cfg.run.horizon = (uint32_t)rng.below(2000);
    cfg.run.seed = rng.next_u64();
    cfg.run.ttl = 1 + (uint32_t)rng.below(64);
    cfg.set("defense.architectures", archs[rng.below(6)]);
    cfg.validate();

    ScenarioConfig back = ScenarioConfig::parse(cfg.serialize());
    CHECK(back == cfg);
    CHECK(back.serialize() == cfg.serialize());
  }
}

TEST_CASE("config error text joins all issues") {
  try {
    ScenarioConfig::parse("world.L = 0\nrun.ttl = 0\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string what = e.what();
    CHECK(what.find("world.L") != std::string::npos);
    CHECK(what.find("run.ttl") != std::string::npos);
  }
}
