#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace immunet {

enum class Architecture : uint8_t {
  Barrier,
  Blacklist,
  Endpoint,
  RouterFilter,
  P2pSecurityware,
};

enum class RegulationMode : uint8_t { OneSignal, TwoSignal };

// Thrown by parsing/validation; carries every problem found, not just the
// first, so a config file can be fixed in one pass.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Full scenario description. Field defaults are the documented defaults for
// omitted keys; an empty config file is valid. Text format: one
// `section.key = value` per line, `#` starts a comment, unknown keys are
// errors.
struct ScenarioConfig {
  struct World {
    uint32_t signature_bits = 64;  // key: world.L
    uint32_t endpoints = 200;
    uint32_t routers = 20;
    uint32_t extra_router_edges = 10;
    uint32_t lymph_services = 1;
    double vulnerability = 0.8;
    bool routers_infectable = false;
    bool operator==(const World&) const = default;
  } world;

  struct Self {
    uint32_t clusters = 4;
    double radius = 0.05;
    uint32_t training_samples = 64;
    bool operator==(const Self&) const = default;
  } self;

  struct Traffic {
    double legit_rate = 1.0;      // legit packets per endpoint per step
    double spam_multiplier = 0.0; // extra spam per infected host per step, x legit_rate
    bool operator==(const Traffic&) const = default;
  } traffic;

  struct Strain {
    std::string genome = "random";  // "random" or hex of exactly L/4 digits
    double mutation_rate = 0.0;     // per-bit flip probability per replication
    double fanout = 2.0;            // malicious packets per infected host per step
    double infectivity = 0.8;
    double malware_fraction = 0.5;  // remainder of emissions are spam
    double forge_control_rate = 0.0;  // forged control packets per infected host per step
    double initial_prevalence = 0.0;  // fraction of endpoints infected at start
    uint32_t reinject_delay = 0;      // re-seed patient zero N steps after elimination; 0 = off
    bool operator==(const Strain&) const = default;
  } strain;

  struct Defense {
    std::vector<Architecture> architectures;  // empty = no defenses

    struct Barrier {
      double adoption = 1.0;
      bool operator==(const Barrier&) const = default;
    } barrier;

    struct Blacklist {
      uint32_t threshold = 3;  // distinct reporters before a source is blocked
      double adoption = 1.0;
      bool operator==(const Blacklist&) const = default;
    } blacklist;

    struct Endpoint {
      double adoption = 0.6;  // fraction of endpoints running the scanner
      bool operator==(const Endpoint&) const = default;
    } endpoint;

    struct RouterFilter {
      bool preseed_strain_detector = false;  // start routers with a memory detector for the seed strain
      bool operator==(const RouterFilter&) const = default;
    } router_filter;

    struct Securityware {
      double acceptance = 0.8;  // probability a receiving non-adopter installs
      double push_rate = 1.0;   // per-adopter per-step probability of one push
      bool operator==(const Securityware&) const = default;
    } securityware;

    struct Detector {
      uint32_t match_radius = 14;  // r: contiguous agreement required
      uint32_t repertoire = 64;    // candidate detectors per repertoire
      uint32_t toolbox = 256;      // segment toolbox size
      uint32_t segment_bits = 8;   // w: segment width; must divide L
      uint32_t effector_lifespan = 30;
      bool operator==(const Detector&) const = default;
    } detector;

    struct Lymph {
      bool enabled = true;
      uint32_t clones = 24;        // C
      double mutation_rate = 0.02; // rho
      uint32_t survivors = 6;      // k
      uint32_t rounds = 2;         // G, per antigen per step
      uint32_t retention = 20;     // steps a captured antigen stays eligible
      uint32_t fragments = 3;      // sub-window detectors minted per antigen; 0 = off
      uint32_t fragment_bits = 16;
      uint32_t capacity = 256;     // lymph repertoire cap (memory never evicted)
      uint32_t budget = 2;         // antigens matured per step
      uint32_t seeds = 4;          // best-affinity seeds fed into maturation
      uint32_t capture_dedupe = 8; // recently captured antigen hashes remembered per node
      bool operator==(const Lymph&) const = default;
    } lymph;

    struct Gossip {
      double probability = 0.5;  // g, per neighbor per step
      uint32_t share_top = 8;    // m: detectors carried per share
      bool operator==(const Gossip&) const = default;
    } gossip;

    struct Regulation {
      RegulationMode mode = RegulationMode::TwoSignal;
      uint32_t window = 3;             // corroboration window, steps
      uint32_t damage_threshold = 6;   // emissions within window that flag damage
      uint32_t quarantine_duration = 25;
      bool operator==(const Regulation&) const = default;
    } regulation;

    bool operator==(const Defense&) const = default;
  } defense;

  struct Run {
    uint32_t horizon = 500;
    uint64_t seed = 1;
    uint32_t replicates = 1;
    uint32_t cooldown = 10;  // sustained-zero steps before declaring elimination
    uint32_t ttl = 32;       // packet hop budget
    int64_t patient_zero = -1;  // endpoint id; -1 = lowest endpoint id
    bool operator==(const Run&) const = default;
  } run;

  bool operator==(const ScenarioConfig&) const = default;

  bool has(Architecture a) const;

  // Parse `section.key = value` text. Defaults fill omitted keys. Throws
  // ConfigError listing every bad line (unknown key, bad value) and every
  // semantic violation.
  static ScenarioConfig parse(std::string_view text);

  // Set one key from its text form. Throws ConfigError on unknown key or bad
  // value. Does not run full validation; call validate() after a batch.
  void set(std::string_view key, std::string_view value);

  // Text form of one key's current value. Throws ConfigError on unknown key.
  std::string get(std::string_view key) const;

  // Canonical text form: every key, grouped by section, default-independent.
  // parse(serialize()) == *this for any valid config.
  std::string serialize() const;

  // Semantic checks (ranges, divisibility, cross-field). Throws ConfigError
  // listing all violations.
  void validate() const;
};

const char* architecture_name(Architecture a);

}  // namespace immunet
