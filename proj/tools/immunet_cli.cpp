// immunet command line front end. Talks to the simulation core exclusively
// through the public C API.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "immunet.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;    // bad command line, config rejected
constexpr int kExitRuntime = 2;  // run failed, I/O error

constexpr size_t kErrbufLen = 8192;

struct ConfigHandle {
  immunet_config* ptr = nullptr;
  ~ConfigHandle() { immunet_config_free(ptr); }
};

struct ResultHandle {
  immunet_result* ptr = nullptr;
  ~ResultHandle() { immunet_result_free(ptr); }
};

struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { immunet_string_free(ptr); }
};

int load_config(const std::string& path, ConfigHandle& cfg) {
  char errbuf[kErrbufLen];
  int rc = immunet_config_parse_file(path.c_str(), &cfg.ptr, errbuf, sizeof errbuf);
  if (rc != IMMUNET_OK) {
    std::fprintf(stderr, "%s: %s\n", path.c_str(), errbuf);
    return kExitUsage;
  }
  return kExitOk;
}

uint64_t config_u64(const immunet_config* cfg, const char* key, uint64_t fallback) {
  StringHandle value;
  char errbuf[kErrbufLen];
  if (immunet_config_get(cfg, key, &value.ptr, errbuf, sizeof errbuf) != IMMUNET_OK) {
    return fallback;
  }
  return std::strtoull(value.ptr, nullptr, 10);
}

int run_and_write(const immunet_config* cfg, uint64_t seed, uint32_t replicates,
                  bool parallel, const std::string& out_prefix) {
  char errbuf[kErrbufLen];
  ResultHandle result;
  int rc = immunet_run(cfg, seed, replicates, parallel ? 1 : 0, &result.ptr, errbuf,
                       sizeof errbuf);
  if (rc != IMMUNET_OK) {
    std::fprintf(stderr, "run failed: %s\n", errbuf);
    return kExitRuntime;
  }
  rc = immunet_result_write(result.ptr, out_prefix.c_str(), errbuf, sizeof errbuf);
  if (rc != IMMUNET_OK) {
    std::fprintf(stderr, "write failed: %s\n", errbuf);
    return kExitRuntime;
  }
  return kExitOk;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"immunet: deterministic network epidemic / immune-defense simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(immunet_version()));

  // run
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write metrics + summary");
  std::string run_config, run_out;
  std::optional<uint64_t> run_seed;
  std::optional<uint32_t> run_replicates;
  bool run_parallel = false;
  run_cmd->add_option("--config", run_config, "Scenario config file")->required();
  run_cmd->add_option("--seed", run_seed, "Base seed (default: run.seed from the config)");
  run_cmd->add_option("--out", run_out, "Output path prefix")->required();
  run_cmd->add_option("--replicates", run_replicates,
                      "Replicate count (default: run.replicates from the config)");
  run_cmd->add_flag("--parallel", run_parallel, "Run replicates on worker threads");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one scenario per value of a config key");
  std::string sweep_config, sweep_param, sweep_out;
  std::vector<std::string> sweep_values;
  std::optional<uint64_t> sweep_seed;
  std::optional<uint32_t> sweep_replicates;
  bool sweep_parallel = false;
  sweep_cmd->add_option("--config", sweep_config, "Scenario config file")->required();
  sweep_cmd->add_option("--param", sweep_param, "Config key to vary")->required();
  sweep_cmd->add_option("--values", sweep_values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--seed", sweep_seed, "Base seed (default: run.seed from the config)");
  sweep_cmd->add_option("--out", sweep_out, "Output path prefix")->required();
  sweep_cmd->add_option("--replicates", sweep_replicates,
                        "Replicate count (default: run.replicates from the config)");
  sweep_cmd->add_flag("--parallel", sweep_parallel, "Run replicates on worker threads");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Check a config file and exit");
  std::string validate_config;
  validate_cmd->add_option("--config", validate_config, "Scenario config file")->required();

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Reference implementations");
  auto* oracle_match_cmd =
      oracle_cmd->add_subcommand("match", "Print whether two signatures match at radius r");
  std::string oracle_a, oracle_b;
  uint32_t oracle_r = 0;
  oracle_match_cmd->add_option("--a", oracle_a, "First signature, hex")->required();
  oracle_match_cmd->add_option("--b", oracle_b, "Second signature, hex")->required();
  oracle_match_cmd->add_option("--r", oracle_r, "Match radius in bits")->required();
  oracle_cmd->require_subcommand(1);

  // topology
  auto* topo_cmd = app.add_subcommand("topology", "Print the network edge list");
  std::string topo_config;
  std::optional<uint64_t> topo_seed;
  topo_cmd->add_option("--config", topo_config, "Scenario config file")->required();
  topo_cmd->add_option("--seed", topo_seed, "Seed (default: run.seed from the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  char errbuf[kErrbufLen];

  if (run_cmd->parsed()) {
    ConfigHandle cfg;
    if (int rc = load_config(run_config, cfg); rc != kExitOk) return rc;
    uint64_t seed = run_seed.value_or(config_u64(cfg.ptr, "run.seed", 1));
    uint32_t replicates = run_replicates.value_or(
        static_cast<uint32_t>(config_u64(cfg.ptr, "run.replicates", 1)));
    if (replicates == 0) {
      std::fprintf(stderr, "replicates must be >= 1\n");
      return kExitUsage;
    }
    return run_and_write(cfg.ptr, seed, replicates, run_parallel, run_out);
  }

  if (sweep_cmd->parsed()) {
    ConfigHandle base;
    if (int rc = load_config(sweep_config, base); rc != kExitOk) return rc;
    uint64_t seed = sweep_seed.value_or(config_u64(base.ptr, "run.seed", 1));
    uint32_t replicates = sweep_replicates.value_or(
        static_cast<uint32_t>(config_u64(base.ptr, "run.replicates", 1)));
    if (replicates == 0) {
      std::fprintf(stderr, "replicates must be >= 1\n");
      return kExitUsage;
    }

    std::string index = "{\"param\":\"" + json_escape(sweep_param) + "\",\"seed\":" +
                        std::to_string(seed) + ",\"replicates\":" + std::to_string(replicates) +
                        ",\"runs\":[";
    for (size_t i = 0; i < sweep_values.size(); ++i) {
      ConfigHandle cfg;
      if (int rc = load_config(sweep_config, cfg); rc != kExitOk) return rc;
      int rc = immunet_config_set(cfg.ptr, sweep_param.c_str(), sweep_values[i].c_str(),
                                  errbuf, sizeof errbuf);
      if (rc == IMMUNET_OK) rc = immunet_config_validate(cfg.ptr, errbuf, sizeof errbuf);
      if (rc != IMMUNET_OK) {
        std::fprintf(stderr, "%s = %s: %s\n", sweep_param.c_str(), sweep_values[i].c_str(),
                     errbuf);
        return kExitUsage;
      }
      std::string prefix = sweep_out + "_v" + std::to_string(i);
      if (int rrc = run_and_write(cfg.ptr, seed, replicates, sweep_parallel, prefix);
          rrc != kExitOk) {
        return rrc;
      }
      size_t slash = prefix.find_last_of('/');
      std::string name = slash == std::string::npos ? prefix : prefix.substr(slash + 1);
      if (i != 0) index += ',';
      index += "{\"value\":\"" + json_escape(sweep_values[i]) + "\",\"prefix\":\"" +
               json_escape(name) + "\"}";
    }
    index += "]}\n";

    std::string index_path = sweep_out + "_index.json";
    std::FILE* f = std::fopen(index_path.c_str(), "wb");
    if (f == nullptr || std::fwrite(index.data(), 1, index.size(), f) != index.size()) {
      if (f != nullptr) std::fclose(f);
      std::fprintf(stderr, "write failed: %s\n", index_path.c_str());
      return kExitRuntime;
    }
    std::fclose(f);
    return kExitOk;
  }

  if (validate_cmd->parsed()) {
    ConfigHandle cfg;
    if (int rc = load_config(validate_config, cfg); rc != kExitOk) return rc;
    std::printf("ok\n");
    return kExitOk;
  }

  if (oracle_match_cmd->parsed()) {
    int match = 0;
    int rc = immunet_oracle_match(oracle_a.c_str(), oracle_b.c_str(), oracle_r, &match,
                                  errbuf, sizeof errbuf);
    if (rc != IMMUNET_OK) {
      std::fprintf(stderr, "%s\n", errbuf);
      return kExitUsage;
    }
    std::printf("%s\n", match ? "true" : "false");
    return kExitOk;
  }

  if (topo_cmd->parsed()) {
    ConfigHandle cfg;
    if (int rc = load_config(topo_config, cfg); rc != kExitOk) return rc;
    uint64_t seed = topo_seed.value_or(config_u64(cfg.ptr, "run.seed", 1));
    StringHandle text;
    int rc = immunet_topology_dump(cfg.ptr, seed, &text.ptr, errbuf, sizeof errbuf);
    if (rc != IMMUNET_OK) {
      std::fprintf(stderr, "%s\n", errbuf);
      return kExitRuntime;
    }
    std::fputs(text.ptr, stdout);
    return kExitOk;
  }

  return kExitUsage;
}
