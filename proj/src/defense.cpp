#include "defense.hpp"

#include <algorithm>

namespace immunet {

void SignalLog::prune(uint64_t now, uint32_t window) {
  uint64_t oldest = now >= window ? now - window + 1 : 0;
  for (auto it = suspects_.begin(); it != suspects_.end();) {
    auto& entry = it->second;
    auto expired_match = [oldest](const MatchSignal& m) { return m.step < oldest; };
    auto expired_trigger = [oldest](const ControlTrigger& t) { return t.step < oldest; };
    entry.matches.erase(std::remove_if(entry.matches.begin(), entry.matches.end(), expired_match),
                        entry.matches.end());
    entry.triggers.erase(
        std::remove_if(entry.triggers.begin(), entry.triggers.end(), expired_trigger),
        entry.triggers.end());
    if (entry.matches.empty() && entry.triggers.empty()) {
      it = suspects_.erase(it);
    } else {
      ++it;
    }
  }
}

ActionDecision regulate_action(const SignalLog::SuspectEntry& entry, bool damage_flag,
                               RegulationMode mode) {
  uint32_t distinct = entry.distinct_match_templates();
  if (mode == RegulationMode::OneSignal) {
    return distinct >= 1 ? ActionDecision::Quarantine : ActionDecision::NoAction;
  }
  if (distinct >= 2) return ActionDecision::Quarantine;
  if (distinct >= 1 && damage_flag) return ActionDecision::Quarantine;
  return ActionDecision::NoAction;
}

bool serves_service_port(const Host& host) {
  if (host.kind != NodeKind::Endpoint) return true;  // routers and lymph services
  return host.adopts.scanner || host.adopts.securityware;
}

bool barrier_admit(const Host& host, const PacketView& packet, uint64_t valid_token) {
  if (packet.control != ControlKind::None && packet.token != valid_token) return false;
  if (packet.port == Port::Service && !serves_service_port(host)) return false;
  return true;
}

}  // namespace immunet
