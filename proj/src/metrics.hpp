#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace immunet {

// One row per simulation step. sent/delivered/blocked counters are cumulative
// over the run; census columns are instantaneous snapshots.
struct MetricsRecord {
  uint64_t step = 0;
  uint32_t infected_count = 0;
  uint32_t quarantined_count = 0;
  uint32_t adopter_count = 0;
  uint64_t legit_sent = 0;
  uint64_t legit_delivered = 0;
  uint64_t legit_blocked = 0;
  uint64_t spam_sent = 0;
  uint64_t spam_delivered = 0;
  uint64_t spam_blocked = 0;
  uint64_t malware_sent = 0;
  uint64_t malware_delivered = 0;
  uint64_t malware_blocked = 0;
  uint64_t securityware_packets = 0;
  uint64_t control_packets = 0;
  uint32_t detectors_naive = 0;
  uint32_t detectors_effector = 0;
  uint32_t detectors_memory = 0;
  uint32_t distinct_strains_alive = 0;
  uint64_t reports_filed = 0;
  uint32_t malware_in_flight = 0;

  bool quiet() const { return infected_count == 0 && malware_in_flight == 0; }
};

inline constexpr std::array<const char*, 21> kMetricsFields = {
    "step",
    "infected_count",
    "quarantined_count",
    "adopter_count",
    "legit_sent",
    "legit_delivered",
    "legit_blocked",
    "spam_sent",
    "spam_delivered",
    "spam_blocked",
    "malware_sent",
    "malware_delivered",
    "malware_blocked",
    "securityware_packets",
    "control_packets",
    "detectors_naive",
    "detectors_effector",
    "detectors_memory",
    "distinct_strains_alive",
    "reports_filed",
    "malware_in_flight",
};

struct Summary {
  bool ran = true;  // false for a zero-step run
  bool eliminated = false;
  std::optional<uint64_t> time_to_elimination;
  uint64_t prevalence_auc = 0;  // plain sum of infected_count over steps
  double fpr = 0.0;             // legit_blocked / legit_sent
  double fnr = 0.0;             // malware_delivered / malware_sent
  double overhead = 0.0;        // (securityware + control) / all packets sent
  uint32_t peak_prevalence = 0;
};

// Elimination = the series ends in an unbroken tail of steps with zero
// infected hosts and zero malware in flight, and that tail is at least the
// cool-down long. A series that is quiet from its very first step counts as
// eliminated at step 0 regardless of length (nothing was ever alive).
Summary summarize(const std::vector<MetricsRecord>& series, uint32_t cooldown);

std::string metrics_csv(const std::vector<MetricsRecord>& series);
std::string summary_json(const Summary& summary);

std::string format_double_shortest(double v);

// Writes content to path, throwing std::runtime_error naming the path on
// failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace immunet
