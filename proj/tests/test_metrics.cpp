#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "metrics.hpp"

using namespace immunet;

namespace {

MetricsRecord row(uint64_t step, uint32_t infected, uint32_t in_flight = 0) {
  MetricsRecord r;
  r.step = step;
  r.infected_count = infected;
  r.malware_in_flight = in_flight;
  return r;
}

}  // namespace

TEST_CASE("empty series marks the run as not run") {
  Summary s = summarize({}, 10);
  CHECK_FALSE(s.ran);
  CHECK_FALSE(s.eliminated);
  CHECK_FALSE(s.time_to_elimination.has_value());
  CHECK(s.prevalence_auc == 0);
  CHECK(s.peak_prevalence == 0);
  CHECK(s.fpr == 0.0);
  CHECK(s.fnr == 0.0);
}

TEST_CASE("all-quiet series counts as eliminated at step zero") {
  std::vector<MetricsRecord> series = {row(0, 0), row(1, 0), row(2, 0)};
  Summary s = summarize(series, 10);  // tail shorter than cooldown, but quiet from birth
  CHECK(s.ran);
  CHECK(s.eliminated);
  REQUIRE(s.time_to_elimination.has_value());
  CHECK(*s.time_to_elimination == 0);
  CHECK(s.prevalence_auc == 0);
}

TEST_CASE("elimination requires the cool-down sustained quiet tail") {
  // Infection dies at step 5; quiet tail steps 5..9 (length 5).
  std::vector<MetricsRecord> series;
  for (uint64_t t = 0; t < 5; ++t) series.push_back(row(t, 3));
  for (uint64_t t = 5; t < 10; ++t) series.push_back(row(t, 0));

  Summary long_enough = summarize(series, 5);
  CHECK(long_enough.eliminated);
  REQUIRE(long_enough.time_to_elimination.has_value());
  CHECK(*long_enough.time_to_elimination == 5);
  CHECK(long_enough.prevalence_auc == 15);
  CHECK(long_enough.peak_prevalence == 3);

  Summary too_short = summarize(series, 6);
  CHECK_FALSE(too_short.eliminated);
  CHECK_FALSE(too_short.time_to_elimination.has_value());

  // In-flight malware spoils quiet even with zero infected hosts.
  auto with_flight = series;
  with_flight[7].malware_in_flight = 2;
  Summary spoiled = summarize(with_flight, 2);
  CHECK(spoiled.eliminated);
  REQUIRE(spoiled.time_to_elimination.has_value());
  CHECK(*spoiled.time_to_elimination == 8);  // tail restarts after the flight

  // A relapse at the very end means no quiet tail at all.
  auto relapse = series;
  relapse.back().infected_count = 1;
  Summary r = summarize(relapse, 1);
  CHECK_FALSE(r.eliminated);
}

TEST_CASE("rates come from the final cumulative row") {
  std::vector<MetricsRecord> series = {row(0, 1), row(1, 1)};
  auto& last = series.back();
  last.legit_sent = 200;
  last.legit_blocked = 30;
  last.malware_sent = 50;
  last.malware_delivered = 10;
  last.spam_sent = 100;
  last.securityware_packets = 25;
  last.control_packets = 25;

  Summary s = summarize(series, 3);
  CHECK(s.fpr == doctest::Approx(0.15));
  CHECK(s.fnr == doctest::Approx(0.2));
  // overhead = 50 / (200 + 100 + 50 + 25 + 25)
  CHECK(s.overhead == doctest::Approx(50.0 / 400.0));

  // Zero denominators stay zero rather than dividing by zero.
  Summary z = summarize({row(0, 0)}, 1);
  CHECK(z.fpr == 0.0);
  CHECK(z.fnr == 0.0);
  CHECK(z.overhead == 0.0);
}

TEST_CASE("hand-built series sums area under prevalence") {
  std::vector<MetricsRecord> series = {row(0, 2), row(1, 5), row(2, 4), row(3, 1), row(4, 0)};
  Summary s = summarize(series, 1);
  CHECK(s.prevalence_auc == 12);
  CHECK(s.peak_prevalence == 5);
  CHECK(s.eliminated);
  CHECK(*s.time_to_elimination == 4);
}

TEST_CASE("csv header lists every field in declaration order") {
  std::string csv = metrics_csv({});
  CHECK(csv ==
        "step,infected_count,quarantined_count,adopter_count,"
        "legit_sent,legit_delivered,legit_blocked,"
        "spam_sent,spam_delivered,spam_blocked,"
        "malware_sent,malware_delivered,malware_blocked,"
        "securityware_packets,control_packets,"
        "detectors_naive,detectors_effector,detectors_memory,"
        "distinct_strains_alive,reports_filed,malware_in_flight\n");
}

TEST_CASE("csv rows carry one value per field, newline terminated") {
  MetricsRecord r;
  r.step = 7;
  r.infected_count = 1;
  r.quarantined_count = 2;
  r.adopter_count = 3;
  r.legit_sent = 4;
  r.legit_delivered = 5;
  r.legit_blocked = 6;
  r.spam_sent = 7;
  r.spam_delivered = 8;
  r.spam_blocked = 9;
  r.malware_sent = 10;
  r.malware_delivered = 11;
  r.malware_blocked = 12;
  r.securityware_packets = 13;
  r.control_packets = 14;
  r.detectors_naive = 15;
  r.detectors_effector = 16;
  r.detectors_memory = 17;
  r.distinct_strains_alive = 18;
  r.reports_filed = 19;
  r.malware_in_flight = 20;

  std::string csv = metrics_csv({r});
  size_t header_end = csv.find('\n');
  std::string line = csv.substr(header_end + 1);
  CHECK(line == "7,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20\n");

  // Column count equals field count in every row.
  size_t commas = 0;
  for (char c : line) {
    if (c == ',') ++commas;
  }
  CHECK(commas + 1 == kMetricsFields.size());
}

TEST_CASE("summary json bytes are pinned") {
  Summary s;
  s.ran = true;
  s.eliminated = true;
  s.time_to_elimination = 42;
  s.prevalence_auc = 1234;
  s.fpr = 0.25;
  s.fnr = 0.5;
  s.overhead = 0.125;
  s.peak_prevalence = 99;
  CHECK(summary_json(s) ==
        "{\"eliminated\":true,\"time_to_elimination\":42,\"prevalence_auc\":1234,"
        "\"fpr\":0.25,\"fnr\":0.5,\"overhead\":0.125,\"peak_prevalence\":99,"
        "\"status\":\"ok\"}\n");

  Summary none;
  none.ran = false;
  CHECK(summary_json(none) ==
        "{\"eliminated\":false,\"time_to_elimination\":\"none\",\"prevalence_auc\":0,"
        "\"fpr\":0,\"fnr\":0,\"overhead\":0,\"peak_prevalence\":0,"
        "\"status\":\"not_run\"}\n");
}

TEST_CASE("format_double_shortest round trips cleanly") {
  CHECK(format_double_shortest(0.0) == "0");
  CHECK(format_double_shortest(1.0) == "1");
  CHECK(format_double_shortest(0.5) == "0.5");
  CHECK(format_double_shortest(0.1) == "0.1");  // shortest form, not 0.1000000000000001
  CHECK(format_double_shortest(1.0 / 3.0) == "0.3333333333333333");
}

TEST_CASE("write_text_file writes bytes exactly and reports failures") {
  std::string path = "/tmp/immunet_metrics_test.txt";
  write_text_file(path, "line one\nline two\n");
  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  char buf[64] = {};
  size_t n = std::fread(buf, 1, sizeof buf, f);
  std::fclose(f);
  std::remove(path.c_str());
  CHECK(std::string(buf, n) == "line one\nline two\n");

  CHECK_THROWS_AS(write_text_file("/nonexistent_dir_xyz/file.txt", "x"), std::runtime_error);
}
