#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <sstream>

namespace immunet {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out;
  for (size_t i = 0; i < issues.size(); ++i) {
    if (i) out += '\n';
    out += issues[i];
  }
  return out;
}

std::string_view trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

uint64_t parse_uint(std::string_view v, uint64_t max_value) {
  uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw std::invalid_argument("expected a nonnegative integer, got '" + std::string(v) + "'");
  }
  if (out > max_value) throw std::invalid_argument("value out of range: '" + std::string(v) + "'");
  return out;
}

int64_t parse_int(std::string_view v) {
  int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw std::invalid_argument("expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw std::invalid_argument("expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected true/false, got '" + std::string(v) + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

Architecture parse_architecture(std::string_view token) {
  if (token == "barrier") return Architecture::Barrier;
  if (token == "blacklist") return Architecture::Blacklist;
  if (token == "endpoint") return Architecture::Endpoint;
  if (token == "router_filter") return Architecture::RouterFilter;
  if (token == "p2p_securityware") return Architecture::P2pSecurityware;
  throw std::invalid_argument("unknown architecture '" + std::string(token) +
                              "' (expected barrier, blacklist, endpoint, router_filter, p2p_securityware)");
}

std::vector<Architecture> parse_architecture_list(std::string_view v) {
  v = trim(v);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') throw std::invalid_argument("unterminated architecture list");
    v = trim(v.substr(1, v.size() - 2));
  }
  std::vector<Architecture> out;
  if (v.empty() || v == "none") return out;
  size_t pos = 0;
  while (pos <= v.size()) {
    size_t comma = v.find(',', pos);
    std::string_view token = trim(v.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
    if (token.empty()) throw std::invalid_argument("empty architecture token");
    Architecture a = parse_architecture(token);
    if (std::find(out.begin(), out.end(), a) != out.end()) {
      throw std::invalid_argument("duplicate architecture '" + std::string(token) + "'");
    }
    out.push_back(a);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string format_architecture_list(const std::vector<Architecture>& archs) {
  if (archs.empty()) return "none";
  std::string out = "[";
  for (size_t i = 0; i < archs.size(); ++i) {
    if (i) out += ", ";
    out += architecture_name(archs[i]);
  }
  out += "]";
  return out;
}

struct KeyEntry {
  const char* name;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

const std::vector<KeyEntry>& key_table() {
  static const std::vector<KeyEntry> table = {
      {"world.L",
       [](ScenarioConfig& c, std::string_view v) { c.world.signature_bits = (uint32_t)parse_uint(v, 1u << 20); },
       [](const ScenarioConfig& c) { return std::to_string(c.world.signature_bits); }},
      {"world.endpoints",
       [](ScenarioConfig& c, std::string_view v) { c.world.endpoints = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.world.endpoints); }},
      {"world.routers",
       [](ScenarioConfig& c, std::string_view v) { c.world.routers = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.world.routers); }},
      {"world.extra_router_edges",
       [](ScenarioConfig& c, std::string_view v) { c.world.extra_router_edges = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.world.extra_router_edges); }},
      {"world.lymph_services",
       [](ScenarioConfig& c, std::string_view v) { c.world.lymph_services = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.world.lymph_services); }},
      {"world.vulnerability",
       [](ScenarioConfig& c, std::string_view v) { c.world.vulnerability = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.world.vulnerability); }},
      {"world.routers_infectable",
       [](ScenarioConfig& c, std::string_view v) { c.world.routers_infectable = parse_bool(v); },
       [](const ScenarioConfig& c) { return c.world.routers_infectable ? "true" : "false"; }},

      {"self.clusters",
       [](ScenarioConfig& c, std::string_view v) { c.self.clusters = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.self.clusters); }},
      {"self.radius",
       [](ScenarioConfig& c, std::string_view v) { c.self.radius = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.self.radius); }},
      {"self.training_samples",
       [](ScenarioConfig& c, std::string_view v) { c.self.training_samples = (uint32_t)parse_uint(v, 1u << 20); },
       [](const ScenarioConfig& c) { return std::to_string(c.self.training_samples); }},

      {"traffic.legit_rate",
       [](ScenarioConfig& c, std::string_view v) { c.traffic.legit_rate = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.traffic.legit_rate); }},
      {"traffic.spam_multiplier",
       [](ScenarioConfig& c, std::string_view v) { c.traffic.spam_multiplier = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.traffic.spam_multiplier); }},

      {"strain.genome",
       [](ScenarioConfig& c, std::string_view v) { c.strain.genome = std::string(v); },
       [](const ScenarioConfig& c) { return c.strain.genome; }},
      {"strain.mutation_rate",
       [](ScenarioConfig& c, std::string_view v) { c.strain.mutation_rate = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.strain.mutation_rate); }},
      {"strain.fanout",
       [](ScenarioConfig& c, std::string_view v) { c.strain.fanout = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.strain.fanout); }},
      {"strain.infectivity",
       [](ScenarioConfig& c, std::string_view v) { c.strain.infectivity = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.strain.infectivity); }},
      {"strain.malware_fraction",
       [](ScenarioConfig& c, std::string_view v) { c.strain.malware_fraction = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.strain.malware_fraction); }},
      {"strain.forge_control_rate",
       [](ScenarioConfig& c, std::string_view v) { c.strain.forge_control_rate = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.strain.forge_control_rate); }},
      {"strain.initial_prevalence",
       [](ScenarioConfig& c, std::string_view v) { c.strain.initial_prevalence = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.strain.initial_prevalence); }},
      {"strain.reinject_delay",
       [](ScenarioConfig& c, std::string_view v) { c.strain.reinject_delay = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.strain.reinject_delay); }},

      {"defense.architectures",
       [](ScenarioConfig& c, std::string_view v) { c.defense.architectures = parse_architecture_list(v); },
       [](const ScenarioConfig& c) { return format_architecture_list(c.defense.architectures); }},

      {"defense.barrier.adoption",
       [](ScenarioConfig& c, std::string_view v) { c.defense.barrier.adoption = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.defense.barrier.adoption); }},

      {"defense.blacklist.threshold",
       [](ScenarioConfig& c, std::string_view v) { c.defense.blacklist.threshold = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.blacklist.threshold); }},
      {"defense.blacklist.adoption",
       [](ScenarioConfig& c, std::string_view v) { c.defense.blacklist.adoption = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.defense.blacklist.adoption); }},

      {"defense.endpoint.adoption",
       [](ScenarioConfig& c, std::string_view v) { c.defense.endpoint.adoption = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.defense.endpoint.adoption); }},

      {"defense.router_filter.preseed_strain_detector",
       [](ScenarioConfig& c, std::string_view v) { c.defense.router_filter.preseed_strain_detector = parse_bool(v); },
       [](const ScenarioConfig& c) { return c.defense.router_filter.preseed_strain_detector ? "true" : "false"; }},

      {"defense.p2p_securityware.acceptance",
       [](ScenarioConfig& c, std::string_view v) { c.defense.securityware.acceptance = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.defense.securityware.acceptance); }},
      {"defense.p2p_securityware.push_rate",
       [](ScenarioConfig& c, std::string_view v) { c.defense.securityware.push_rate = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.defense.securityware.push_rate); }},

      {"defense.detector.match_radius",
       [](ScenarioConfig& c, std::string_view v) { c.defense.detector.match_radius = (uint32_t)parse_uint(v, 1u << 20); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.detector.match_radius); }},
      {"defense.detector.repertoire",
       [](ScenarioConfig& c, std::string_view v) { c.defense.detector.repertoire = (uint32_t)parse_uint(v, 1u << 20); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.detector.repertoire); }},
      {"defense.detector.toolbox",
       [](ScenarioConfig& c, std::string_view v) { c.defense.detector.toolbox = (uint32_t)parse_uint(v, 1u << 20); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.detector.toolbox); }},
      {"defense.detector.segment_bits",
       [](ScenarioConfig& c, std::string_view v) { c.defense.detector.segment_bits = (uint32_t)parse_uint(v, 1u << 20); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.detector.segment_bits); }},
      {"defense.detector.effector_lifespan",
       [](ScenarioConfig& c, std::string_view v) { c.defense.detector.effector_lifespan = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.detector.effector_lifespan); }},

      {"defense.lymph.enabled",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.enabled = parse_bool(v); },
       [](const ScenarioConfig& c) { return c.defense.lymph.enabled ? "true" : "false"; }},
      {"defense.lymph.clones",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.clones = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.lymph.clones); }},
      {"defense.lymph.mutation_rate",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.mutation_rate = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.defense.lymph.mutation_rate); }},
      {"defense.lymph.survivors",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.survivors = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.lymph.survivors); }},
      {"defense.lymph.rounds",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.rounds = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.lymph.rounds); }},
      {"defense.lymph.retention",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.retention = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.lymph.retention); }},
      {"defense.lymph.fragments",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.fragments = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.lymph.fragments); }},
      {"defense.lymph.fragment_bits",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.fragment_bits = (uint32_t)parse_uint(v, 1u << 20); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.lymph.fragment_bits); }},
      {"defense.lymph.capacity",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.capacity = (uint32_t)parse_uint(v, 1u << 20); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.lymph.capacity); }},
      {"defense.lymph.budget",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.budget = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.lymph.budget); }},
      {"defense.lymph.seeds",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.seeds = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.lymph.seeds); }},
      {"defense.lymph.capture_dedupe",
       [](ScenarioConfig& c, std::string_view v) { c.defense.lymph.capture_dedupe = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.lymph.capture_dedupe); }},

      {"defense.gossip.probability",
       [](ScenarioConfig& c, std::string_view v) { c.defense.gossip.probability = parse_double(v); },
       [](const ScenarioConfig& c) { return format_double(c.defense.gossip.probability); }},
      {"defense.gossip.share_top",
       [](ScenarioConfig& c, std::string_view v) { c.defense.gossip.share_top = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.gossip.share_top); }},

      {"defense.regulation.mode",
       [](ScenarioConfig& c, std::string_view v) {
         if (v == "one_signal") {
           c.defense.regulation.mode = RegulationMode::OneSignal;
         } else if (v == "two_signal") {
           c.defense.regulation.mode = RegulationMode::TwoSignal;
         } else {
           throw std::invalid_argument("expected one_signal or two_signal, got '" + std::string(v) + "'");
         }
       },
       [](const ScenarioConfig& c) {
         return std::string(c.defense.regulation.mode == RegulationMode::OneSignal ? "one_signal" : "two_signal");
       }},
      {"defense.regulation.window",
       [](ScenarioConfig& c, std::string_view v) { c.defense.regulation.window = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.regulation.window); }},
      {"defense.regulation.damage_threshold",
       [](ScenarioConfig& c, std::string_view v) { c.defense.regulation.damage_threshold = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.regulation.damage_threshold); }},
      {"defense.regulation.quarantine_duration",
       [](ScenarioConfig& c, std::string_view v) { c.defense.regulation.quarantine_duration = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.defense.regulation.quarantine_duration); }},

      {"run.horizon",
       [](ScenarioConfig& c, std::string_view v) { c.run.horizon = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.run.horizon); }},
      {"run.seed",
       [](ScenarioConfig& c, std::string_view v) { c.run.seed = parse_uint(v, ~uint64_t{0}); },
       [](const ScenarioConfig& c) { return std::to_string(c.run.seed); }},
      {"run.replicates",
       [](ScenarioConfig& c, std::string_view v) { c.run.replicates = (uint32_t)parse_uint(v, 1u << 16); },
       [](const ScenarioConfig& c) { return std::to_string(c.run.replicates); }},
      {"run.cooldown",
       [](ScenarioConfig& c, std::string_view v) { c.run.cooldown = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.run.cooldown); }},
      {"run.ttl",
       [](ScenarioConfig& c, std::string_view v) { c.run.ttl = (uint32_t)parse_uint(v, 1u << 24); },
       [](const ScenarioConfig& c) { return std::to_string(c.run.ttl); }},
      {"run.patient_zero",
       [](ScenarioConfig& c, std::string_view v) { c.run.patient_zero = parse_int(v); },
       [](const ScenarioConfig& c) { return std::to_string(c.run.patient_zero); }},
  };
  return table;
}

const KeyEntry* find_key(std::string_view name) {
  for (const auto& e : key_table()) {
    if (name == e.name) return &e;
  }
  return nullptr;
}

bool is_hex(std::string_view s) {
  return !s.empty() && s.find_first_not_of("0123456789abcdefABCDEF") == std::string_view::npos;
}

void check_unit(std::vector<std::string>& issues, const char* key, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    issues.push_back(std::string(key) + ": must be a probability in [0, 1]");
  }
}

void check_nonneg(std::vector<std::string>& issues, const char* key, double v) {
  if (!(v >= 0.0)) issues.push_back(std::string(key) + ": must be >= 0");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

const char* architecture_name(Architecture a) {
  switch (a) {
    case Architecture::Barrier: return "barrier";
    case Architecture::Blacklist: return "blacklist";
    case Architecture::Endpoint: return "endpoint";
    case Architecture::RouterFilter: return "router_filter";
    case Architecture::P2pSecurityware: return "p2p_securityware";
  }
  return "?";
}

bool ScenarioConfig::has(Architecture a) const {
  return std::find(defense.architectures.begin(), defense.architectures.end(), a) !=
         defense.architectures.end();
}

ScenarioConfig ScenarioConfig::parse(std::string_view text) {
  ScenarioConfig cfg;
  std::vector<std::string> issues;
  size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        issues.push_back("line " + std::to_string(line_no) + ": expected 'section.key = value'");
      } else {
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        const KeyEntry* entry = find_key(key);
        if (entry == nullptr) {
          issues.push_back("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        } else {
          try {
            entry->set(cfg, value);
          } catch (const std::invalid_argument& e) {
            issues.push_back("line " + std::to_string(line_no) + ": " + std::string(key) + ": " + e.what());
          }
        }
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (!issues.empty()) {
    // Range checks still run on whatever parsed, so a single report covers
    // both malformed lines and out-of-range values.
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
    throw ConfigError(std::move(issues));
  }
  cfg.validate();
  return cfg;
}

void ScenarioConfig::set(std::string_view key, std::string_view value) {
  const KeyEntry* entry = find_key(key);
  if (entry == nullptr) {
    throw ConfigError({"unknown key '" + std::string(key) + "'"});
  }
  try {
    entry->set(*this, trim(value));
  } catch (const std::invalid_argument& e) {
    throw ConfigError({std::string(key) + ": " + e.what()});
  }
}

std::string ScenarioConfig::get(std::string_view key) const {
  const KeyEntry* entry = find_key(trim(key));
  if (entry == nullptr) {
    throw ConfigError({"unknown key '" + std::string(key) + "'"});
  }
  return entry->get(*this);
}

std::string ScenarioConfig::serialize() const {
  std::string out;
  std::string last_section;
  for (const auto& entry : key_table()) {
    std::string_view name = entry.name;
    std::string section(name.substr(0, name.find('.')));
    if (section != last_section) {
      if (!out.empty()) out += '\n';
      last_section = section;
    }
    out += entry.name;
    out += " = ";
    out += entry.get(*this);
    out += '\n';
  }
  return out;
}

void ScenarioConfig::validate() const {
  std::vector<std::string> issues;

  if (world.signature_bits < 1) issues.push_back("world.L: must be >= 1");
  check_unit(issues, "world.vulnerability", world.vulnerability);
  if (world.routers == 0 && world.endpoints > 0) {
    issues.push_back("world.routers: must be >= 1 when endpoints are present (backbone cannot connect)");
  }
  if (world.routers == 0 && world.lymph_services > 0) {
    issues.push_back("world.lymph_services: requires at least one router to attach to");
  }

  if (self.clusters < 1) issues.push_back("self.clusters: must be >= 1");
  check_unit(issues, "self.radius", self.radius);

  check_nonneg(issues, "traffic.legit_rate", traffic.legit_rate);
  check_nonneg(issues, "traffic.spam_multiplier", traffic.spam_multiplier);

  if (strain.genome != "random") {
    if (!is_hex(strain.genome)) {
      issues.push_back("strain.genome: must be 'random' or a hex signature");
    } else if (world.signature_bits % 4 != 0 ||
               strain.genome.size() != world.signature_bits / 4) {
      issues.push_back("strain.genome: hex genome must have exactly L/4 digits (L divisible by 4)");
    }
  }
  check_unit(issues, "strain.mutation_rate", strain.mutation_rate);
  check_nonneg(issues, "strain.fanout", strain.fanout);
  check_unit(issues, "strain.infectivity", strain.infectivity);
  check_unit(issues, "strain.malware_fraction", strain.malware_fraction);
  check_nonneg(issues, "strain.forge_control_rate", strain.forge_control_rate);
  check_unit(issues, "strain.initial_prevalence", strain.initial_prevalence);

  check_unit(issues, "defense.barrier.adoption", defense.barrier.adoption);
  if (defense.blacklist.threshold < 1) issues.push_back("defense.blacklist.threshold: must be >= 1");
  check_unit(issues, "defense.blacklist.adoption", defense.blacklist.adoption);
  check_unit(issues, "defense.endpoint.adoption", defense.endpoint.adoption);
  check_unit(issues, "defense.p2p_securityware.acceptance", defense.securityware.acceptance);
  check_unit(issues, "defense.p2p_securityware.push_rate", defense.securityware.push_rate);

  if (defense.detector.match_radius < 1) {
    issues.push_back("defense.detector.match_radius: must be >= 1");
  } else if (defense.detector.match_radius > world.signature_bits) {
    issues.push_back("defense.detector.match_radius: must be <= world.L");
  }
  if (defense.detector.toolbox < 1) issues.push_back("defense.detector.toolbox: must be >= 1");
  if (defense.detector.segment_bits < 1) {
    issues.push_back("defense.detector.segment_bits: must be >= 1");
  } else if (world.signature_bits % defense.detector.segment_bits != 0) {
    issues.push_back("defense.detector.segment_bits: must divide world.L");
  }
  if (defense.detector.effector_lifespan < 1) {
    issues.push_back("defense.detector.effector_lifespan: must be >= 1");
  }

  if (defense.lymph.clones < 1) issues.push_back("defense.lymph.clones: must be >= 1");
  check_unit(issues, "defense.lymph.mutation_rate", defense.lymph.mutation_rate);
  if (defense.lymph.survivors < 1) {
    issues.push_back("defense.lymph.survivors: must be >= 1");
  } else if (defense.lymph.survivors > defense.lymph.clones) {
    issues.push_back("defense.lymph.survivors: must be <= defense.lymph.clones");
  }
  if (defense.lymph.rounds < 1) issues.push_back("defense.lymph.rounds: must be >= 1");
  if (defense.lymph.retention < 1) issues.push_back("defense.lymph.retention: must be >= 1");
  if (defense.lymph.fragment_bits < 1) {
    issues.push_back("defense.lymph.fragment_bits: must be >= 1");
  } else if (defense.lymph.fragment_bits > world.signature_bits) {
    issues.push_back("defense.lymph.fragment_bits: must be <= world.L");
  }
  if (defense.lymph.capacity < 1) issues.push_back("defense.lymph.capacity: must be >= 1");
  if (defense.lymph.budget < 1) issues.push_back("defense.lymph.budget: must be >= 1");
  if (defense.lymph.seeds < 1) issues.push_back("defense.lymph.seeds: must be >= 1");

  check_unit(issues, "defense.gossip.probability", defense.gossip.probability);
  if (defense.gossip.share_top < 1) issues.push_back("defense.gossip.share_top: must be >= 1");

  if (defense.regulation.window < 1) issues.push_back("defense.regulation.window: must be >= 1");
  if (defense.regulation.damage_threshold < 1) {
    issues.push_back("defense.regulation.damage_threshold: must be >= 1");
  }
  if (defense.regulation.quarantine_duration < 1) {
    issues.push_back("defense.regulation.quarantine_duration: must be >= 1");
  }

  if (run.replicates < 1) issues.push_back("run.replicates: must be >= 1");
  if (run.cooldown < 1) issues.push_back("run.cooldown: must be >= 1");
  if (run.ttl < 1) issues.push_back("run.ttl: must be >= 1");
  if (run.patient_zero >= 0) {
    int64_t first = world.routers;
    int64_t last = (int64_t)world.routers + world.endpoints - 1;
    if (world.endpoints == 0 || run.patient_zero < first || run.patient_zero > last) {
      issues.push_back("run.patient_zero: must be an endpoint id (" + std::to_string(first) + ".." +
                       std::to_string(last) + ") or -1");
    }
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
}

}  // namespace immunet
