#include "metrics.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace immunet {

std::string format_double_shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

Summary summarize(const std::vector<MetricsRecord>& series, uint32_t cooldown) {
  Summary s;
  if (series.empty()) {
    s.ran = false;
    return s;
  }

  for (const auto& row : series) {
    s.prevalence_auc += row.infected_count;
    if (row.infected_count > s.peak_prevalence) s.peak_prevalence = row.infected_count;
  }

  const MetricsRecord& last = series.back();
  if (last.legit_sent > 0) {
    s.fpr = static_cast<double>(last.legit_blocked) / static_cast<double>(last.legit_sent);
  }
  if (last.malware_sent > 0) {
    s.fnr = static_cast<double>(last.malware_delivered) / static_cast<double>(last.malware_sent);
  }
  uint64_t total_sent = last.legit_sent + last.spam_sent + last.malware_sent +
                        last.securityware_packets + last.control_packets;
  if (total_sent > 0) {
    s.overhead = static_cast<double>(last.securityware_packets + last.control_packets) /
                 static_cast<double>(total_sent);
  }

  // First step of the quiet tail reaching the end of the series.
  size_t tail_start = series.size();
  for (size_t i = series.size(); i-- > 0;) {
    if (!series[i].quiet()) break;
    tail_start = i;
  }
  if (tail_start < series.size()) {
    size_t tail_len = series.size() - tail_start;
    if (tail_len >= cooldown || tail_start == 0) {
      s.eliminated = true;
      s.time_to_elimination = series[tail_start].step;
    }
  }
  return s;
}

std::string metrics_csv(const std::vector<MetricsRecord>& series) {
  std::string out;
  for (size_t i = 0; i < kMetricsFields.size(); ++i) {
    if (i) out += ',';
    out += kMetricsFields[i];
  }
  out += '\n';
  for (const auto& r : series) {
    out += std::to_string(r.step);
    out += ',';
    out += std::to_string(r.infected_count);
    out += ',';
    out += std::to_string(r.quarantined_count);
    out += ',';
    out += std::to_string(r.adopter_count);
    out += ',';
    out += std::to_string(r.legit_sent);
    out += ',';
    out += std::to_string(r.legit_delivered);
    out += ',';
    out += std::to_string(r.legit_blocked);
    out += ',';
    out += std::to_string(r.spam_sent);
    out += ',';
    out += std::to_string(r.spam_delivered);
    out += ',';
    out += std::to_string(r.spam_blocked);
    out += ',';
    out += std::to_string(r.malware_sent);
    out += ',';
    out += std::to_string(r.malware_delivered);
    out += ',';
    out += std::to_string(r.malware_blocked);
    out += ',';
    out += std::to_string(r.securityware_packets);
    out += ',';
    out += std::to_string(r.control_packets);
    out += ',';
    out += std::to_string(r.detectors_naive);
    out += ',';
    out += std::to_string(r.detectors_effector);
    out += ',';
    out += std::to_string(r.detectors_memory);
    out += ',';
    out += std::to_string(r.distinct_strains_alive);
    out += ',';
    out += std::to_string(r.reports_filed);
    out += ',';
    out += std::to_string(r.malware_in_flight);
    out += '\n';
  }
  return out;
}

std::string summary_json(const Summary& s) {
  std::string out = "{";
  out += "\"eliminated\":";
  out += s.eliminated ? "true" : "false";
  out += ",\"time_to_elimination\":";
  if (s.time_to_elimination.has_value()) {
    out += std::to_string(*s.time_to_elimination);
  } else {
    out += "\"none\"";
  }
  out += ",\"prevalence_auc\":";
  out += std::to_string(s.prevalence_auc);
  out += ",\"fpr\":";
  out += format_double_shortest(s.fpr);
  out += ",\"fnr\":";
  out += format_double_shortest(s.fnr);
  out += ",\"overhead\":";
  out += format_double_shortest(s.overhead);
  out += ",\"peak_prevalence\":";
  out += std::to_string(s.peak_prevalence);
  out += ",\"status\":\"";
  out += s.ran ? "ok" : "not_run";
  out += "\"}";
  out += '\n';
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  size_t written = content.empty() ? 0 : std::fwrite(content.data(), 1, content.size(), f);
  int close_rc = std::fclose(f);
  if (written != content.size() || close_rc != 0) {
    throw std::runtime_error("failed writing '" + path + "'");
  }
}

}  // namespace immunet
