#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "config.hpp"
#include "model.hpp"

namespace immunet {

// Shared origin-reputation service: a source is blocked once enough distinct
// reporters have filed against it. Accumulation only — nothing is delisted
// within a run.
class BlacklistService {
 public:
  explicit BlacklistService(uint32_t threshold) : threshold_(threshold) {}

  void report(uint32_t reporter, uint32_t source) {
    ++reports_filed_;
    auto& reporters = reporters_by_source_[source];
    reporters.insert(reporter);
    if (reporters.size() >= threshold_) blocked_.insert(source);
  }

  bool blocks(uint32_t source) const { return blocked_.count(source) != 0; }
  uint64_t reports_filed() const { return reports_filed_; }
  size_t blocked_count() const { return blocked_.size(); }

 private:
  uint32_t threshold_;
  std::map<uint32_t, std::set<uint32_t>> reporters_by_source_;
  std::set<uint32_t> blocked_;
  uint64_t reports_filed_ = 0;
};

// Evidence gathered against suspected sources, windowed to the corroboration
// period. Distinctness of detector evidence is judged by template content, so
// the same detector matching twice is still one signal.
class SignalLog {
 public:
  struct MatchSignal {
    uint64_t step;
    uint32_t observer;       // node that scanned
    uint64_t template_hash;  // matching detector's template identity
    uint32_t detector_owner; // node owning the detector
    uint64_t detector_local; // local id within the owner's repertoire
  };
  struct ControlTrigger {
    uint64_t step;
    uint32_t reporter;
    bool token_valid;
  };
  struct SuspectEntry {
    std::vector<MatchSignal> matches;
    std::vector<ControlTrigger> triggers;

    uint32_t distinct_match_templates() const {
      std::set<uint64_t> seen;
      for (const auto& m : matches) seen.insert(m.template_hash);
      return static_cast<uint32_t>(seen.size());
    }
    uint32_t invalid_trigger_count() const {
      uint32_t n = 0;
      for (const auto& t : triggers) {
        if (!t.token_valid) ++n;
      }
      return n;
    }
  };

  void add_match(uint32_t suspect, MatchSignal s) { suspects_[suspect].matches.push_back(s); }
  void add_trigger(uint32_t suspect, ControlTrigger t) { suspects_[suspect].triggers.push_back(t); }

  // Drop evidence older than the trailing window ending at `now`.
  void prune(uint64_t now, uint32_t window);

  const std::map<uint32_t, SuspectEntry>& suspects() const { return suspects_; }

 private:
  std::map<uint32_t, SuspectEntry> suspects_;
};

enum class ActionDecision : uint8_t { NoAction, Quarantine };

// Action regulation over the windowed evidence. Two-signal rule: quarantine
// needs two distinct matching templates, or one match corroborated by the
// suspect's abnormal-emission damage flag. One-signal mode (for comparison
// runs) acts on any single match. Control triggers with invalid tokens never
// contribute; valid-token remote detections enter the log as match signals in
// the first place.
ActionDecision regulate_action(const SignalLog::SuspectEntry& entry, bool damage_flag,
                               RegulationMode mode);

// Membrane rule for a barrier-adopting host. Deterministic: control traffic
// with a bad token is refused, as is any service-port packet arriving at a
// host that offers no service port (plain endpoints that run no security
// stack). Open-port traffic always passes, which is exactly why a barrier
// alone cannot stop open-port malware.
bool barrier_admit(const Host& host, const PacketView& packet, uint64_t valid_token);

// Whether this host accepts service-port traffic at all.
bool serves_service_port(const Host& host);

}  // namespace immunet
