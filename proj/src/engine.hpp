#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "config.hpp"
#include "defense.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "threat.hpp"
#include "topology.hpp"

namespace immunet {

struct InfectionRecord {
  uint64_t step;
  uint32_t host;
  uint32_t strain;
  uint64_t packet_id;  // 0 for seeded infections
  bool seeded;
};

struct QuarantineRecord {
  uint64_t step;
  uint32_t host;
  uint64_t release_at;
  bool was_infected;   // ground truth at quarantine time; false = friendly fire
  uint32_t strain;
  uint32_t distinct_matches;
  bool damage_flag;
  uint32_t invalid_triggers;  // forged alerts present in the window at decision time
  std::vector<SignalLog::MatchSignal> evidence;
};

// Per-step packet bookkeeping: created = delivered + blocked + expired +
// (inflight_after - inflight_before) must hold every step.
struct StepLedger {
  uint64_t created = 0;
  uint64_t delivered = 0;
  uint64_t blocked = 0;
  uint64_t expired = 0;
  uint64_t inflight_before = 0;
  uint64_t inflight_after = 0;
};

// One replicate's world. Construction builds topology, self model, hosts,
// repertoires and seeds the initial infection; step() advances the fixed
// phase cycle:
//   1 legit traffic, 2 malicious emission, 3 security emission,
//   4 one-hop routing + router filtering, 5 delivery + barrier/blacklist/
//   endpoint scan, 6 infection resolution, 7 lymph maturation, 8 action
//   regulation + cleanup + decay, 9 metrics record.
// Entities are processed in ascending id order inside every phase.
class World {
 public:
  // label_cipher rotates the stored ground-truth class of every packet by a
  // constant; all engine-side reads decode through true_class(). Because
  // defense layers only ever see PacketView, any cipher value must produce
  // bit-identical runs — the audit suite exploits this to prove no label
  // leaks into defense decisions.
  World(const ScenarioConfig& cfg, uint64_t seed, uint8_t label_cipher = 0);

  void step();
  uint64_t steps_completed() const { return step_; }

  // Schedule a forced re-seeding of the root strain (used by the run driver
  // when strain.reinject_delay is configured).
  void schedule_reinjection(uint64_t at_step) { reinject_at_ = at_step; reinject_scheduled_ = true; }
  void cancel_reinjection() { reinject_scheduled_ = false; }
  bool reinjection_done() const { return reinject_done_; }
  bool reinjection_scheduled() const { return reinject_scheduled_; }

  uint64_t state_hash() const;

  const ScenarioConfig& config() const { return cfg_; }
  const Topology& topology() const { return topo_; }
  const SelfModel& self_model() const { return self_; }
  const std::vector<BitSignature>& self_training_set() const { return self_training_; }
  const std::vector<Host>& hosts() const { return hosts_; }
  std::vector<Host>& hosts() { return hosts_; }  // test access
  const std::vector<MetricsRecord>& series() const { return series_; }
  const std::vector<InfectionRecord>& infections() const { return infections_; }
  const std::vector<QuarantineRecord>& quarantines() const { return quarantines_; }
  const std::vector<StepLedger>& ledgers() const { return ledgers_; }
  const StrainRegistry& strains() const { return strains_; }
  const BlacklistService& blacklist() const { return blacklist_; }
  const std::vector<Packet>& in_flight() const { return in_flight_; }
  uint64_t valid_token() const { return valid_token_; }
  uint32_t root_strain() const { return root_strain_; }
  // Forged (invalid-token) action triggers received over the whole run; the
  // spoof-resistance audit checks quarantines never rest on these alone.
  uint64_t invalid_trigger_total() const { return invalid_trigger_total_; }

  // Decoded ground-truth class of a packet (see the constructor note).
  PacketClass true_class(const Packet& p) const {
    return static_cast<PacketClass>((static_cast<uint8_t>(p.klass) + 5 - label_cipher_) % 5);
  }

 private:
  struct CapturedAntigen {
    BitSignature sig;
    uint64_t first_step;
    uint64_t last_step;
    uint32_t origin;       // node whose detection captured it
    uint64_t insert_order;
    bool fragments_done = false;
  };
  struct LymphNode {
    uint32_t id;
    std::vector<CapturedAntigen> antigens;
    uint64_t next_insert = 0;
  };
  struct PendingInfection {
    uint32_t host;
    uint32_t strain;
    uint64_t packet_id;
  };

  void seed_initial_infections();
  void install_security_stack(Host& host);
  Repertoire make_repertoire(uint32_t node_id);
  void force_infect(uint32_t host_id, uint32_t strain, uint64_t packet_id, bool seeded);

  Packet make_packet(uint32_t src, uint32_t dst, PacketClass klass, BitSignature payload);
  void emit(Packet p);  // counts sent metrics, places into flight

  void capture_antigen(uint32_t observer, const BitSignature& payload);
  void handle_control(Host& host, const Packet& p);
  void deliver_securityware(Host& host, const Packet& p);
  void block_packet(const Packet& p);
  void count_delivered(const Packet& p);

  bool damage_flag(uint32_t host_id) const;

  // Uniform endpoint other than exclude (pass kNone to exclude nothing);
  // kNone when no eligible endpoint exists.
  uint32_t draw_endpoint_target(RngStream& rng, uint32_t exclude) const;

  void phase_reinjection();
  void phase_legit();
  void phase_malicious();
  void phase_security();
  void phase_routing();
  void phase_delivery();
  void phase_infection();
  void phase_lymph();
  void phase_action();
  void phase_record();

  ScenarioConfig cfg_;
  uint64_t seed_;
  uint8_t label_cipher_ = 0;
  uint64_t step_ = 0;

  Topology topo_;
  SelfModel self_;
  std::vector<BitSignature> self_training_;
  std::vector<BitSignature> toolbox_;
  std::vector<Host> hosts_;
  std::vector<LymphNode> lymph_;  // parallel to topo_.lymph_ids

  StrainRegistry strains_;
  uint32_t root_strain_ = 0;
  BitSignature spam_mask_;
  uint64_t valid_token_ = 0;

  BlacklistService blacklist_;
  SignalLog signals_;

  std::vector<Packet> in_flight_;
  std::vector<std::vector<Packet>> arrivals_;  // per node, filled in phase 4
  std::vector<PendingInfection> pending_infections_;
  uint64_t next_packet_id_ = 1;

  // Named deterministic streams (see rng.hpp): per-node streams are indexed
  // by node id and created up front so behavior never depends on when a host
  // installs its stack.
  std::vector<RngStream> legit_rng_;
  std::vector<RngStream> emission_rng_;
  std::vector<RngStream> mutation_rng_;
  std::vector<RngStream> infection_rng_;
  std::vector<RngStream> gossip_rng_;
  std::vector<RngStream> securityware_rng_;
  std::vector<RngStream> maturation_rng_;

  // Cumulative counters mirrored into MetricsRecord.
  MetricsRecord totals_;

  std::vector<MetricsRecord> series_;
  std::vector<InfectionRecord> infections_;
  std::vector<QuarantineRecord> quarantines_;
  std::vector<StepLedger> ledgers_;
  StepLedger current_ledger_;

  bool reinject_scheduled_ = false;
  bool reinject_done_ = false;
  uint64_t reinject_at_ = 0;

  uint64_t invalid_trigger_total_ = 0;
};

struct RunOutput {
  std::vector<MetricsRecord> series;
  Summary summary;
  std::vector<InfectionRecord> infections;
  std::vector<QuarantineRecord> quarantines;
  uint64_t final_state_hash = 0;
  uint64_t invalid_triggers = 0;  // forged action triggers received
};

// Single replicate: horizon steps with early stop once the world has been
// quiet (no infected hosts, no malware in flight) for the cool-down, and the
// optional delayed re-injection of the root strain handled.
RunOutput run_scenario(const ScenarioConfig& cfg, uint64_t seed);

// Replicate k runs with seed base_seed + k. With parallel=true replicates run
// on worker threads; outputs are ordered by replicate index and must be
// identical to the serial schedule.
std::vector<RunOutput> run_replicates(const ScenarioConfig& cfg, uint64_t base_seed,
                                      uint32_t replicates, bool parallel);

}  // namespace immunet
