#include "immunet.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "bitsig.hpp"
#include "config.hpp"
#include "engine.hpp"
#include "metrics.hpp"
#include "topology.hpp"

struct immunet_config {
  immunet::ScenarioConfig cfg;
};

struct immunet_result {
  std::vector<immunet::RunOutput> runs;
  uint64_t base_seed = 0;
};

namespace {

void put_error(char* errbuf, size_t errbuf_len, const std::string& msg) {
  if (errbuf == nullptr || errbuf_len == 0) return;
  size_t n = msg.size() < errbuf_len - 1 ? msg.size() : errbuf_len - 1;
  std::memcpy(errbuf, msg.data(), n);
  errbuf[n] = '\0';
}

void clear_error(char* errbuf, size_t errbuf_len) {
  if (errbuf != nullptr && errbuf_len > 0) errbuf[0] = '\0';
}

std::string issues_text(const immunet::ConfigError& e) {
  std::string out;
  for (const auto& issue : e.issues()) {
    if (!out.empty()) out += '\n';
    out += issue;
  }
  return out.empty() ? std::string(e.what()) : out;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) return nullptr;
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

int deliver_string(const std::string& s, char** out_text) {
  if (out_text == nullptr) return IMMUNET_ERR_INVALID_ARGUMENT;
  *out_text = dup_string(s);
  return *out_text == nullptr ? IMMUNET_ERR_RUNTIME : IMMUNET_OK;
}

}  // namespace

extern "C" {

const char* immunet_version(void) { return "0.1.0"; }

int immunet_config_create(immunet_config** out) {
  if (out == nullptr) return IMMUNET_ERR_INVALID_ARGUMENT;
  *out = new (std::nothrow) immunet_config{};
  return *out == nullptr ? IMMUNET_ERR_RUNTIME : IMMUNET_OK;
}

int immunet_config_parse(const char* text, immunet_config** out, char* errbuf,
                         size_t errbuf_len) {
  clear_error(errbuf, errbuf_len);
  if (text == nullptr || out == nullptr) {
    put_error(errbuf, errbuf_len, "null argument");
    return IMMUNET_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  try {
    auto cfg = immunet::ScenarioConfig::parse(text);
    cfg.validate();
    *out = new immunet_config{std::move(cfg)};
    return IMMUNET_OK;
  } catch (const immunet::ConfigError& e) {
    put_error(errbuf, errbuf_len, issues_text(e));
    return IMMUNET_ERR_PARSE;
  } catch (const std::exception& e) {
    put_error(errbuf, errbuf_len, e.what());
    return IMMUNET_ERR_RUNTIME;
  }
}

int immunet_config_parse_file(const char* path, immunet_config** out, char* errbuf,
                              size_t errbuf_len) {
  clear_error(errbuf, errbuf_len);
  if (path == nullptr || out == nullptr) {
    put_error(errbuf, errbuf_len, "null argument");
    return IMMUNET_ERR_INVALID_ARGUMENT;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    put_error(errbuf, errbuf_len, std::string("cannot read ") + path);
    return IMMUNET_ERR_IO;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return immunet_config_parse(buf.str().c_str(), out, errbuf, errbuf_len);
}

int immunet_config_set(immunet_config* cfg, const char* key, const char* value,
                       char* errbuf, size_t errbuf_len) {
  clear_error(errbuf, errbuf_len);
  if (cfg == nullptr || key == nullptr || value == nullptr) {
    put_error(errbuf, errbuf_len, "null argument");
    return IMMUNET_ERR_INVALID_ARGUMENT;
  }
  try {
    cfg->cfg.set(key, value);
    return IMMUNET_OK;
  } catch (const immunet::ConfigError& e) {
    put_error(errbuf, errbuf_len, issues_text(e));
    return IMMUNET_ERR_PARSE;
  } catch (const std::exception& e) {
    put_error(errbuf, errbuf_len, e.what());
    return IMMUNET_ERR_RUNTIME;
  }
}

int immunet_config_get(const immunet_config* cfg, const char* key, char** out_value,
                       char* errbuf, size_t errbuf_len) {
  clear_error(errbuf, errbuf_len);
  if (cfg == nullptr || key == nullptr || out_value == nullptr) {
    put_error(errbuf, errbuf_len, "null argument");
    return IMMUNET_ERR_INVALID_ARGUMENT;
  }
  try {
    return deliver_string(cfg->cfg.get(key), out_value);
  } catch (const immunet::ConfigError& e) {
    put_error(errbuf, errbuf_len, issues_text(e));
    return IMMUNET_ERR_PARSE;
  } catch (const std::exception& e) {
    put_error(errbuf, errbuf_len, e.what());
    return IMMUNET_ERR_RUNTIME;
  }
}

int immunet_config_validate(const immunet_config* cfg, char* errbuf, size_t errbuf_len) {
  clear_error(errbuf, errbuf_len);
  if (cfg == nullptr) {
    put_error(errbuf, errbuf_len, "null argument");
    return IMMUNET_ERR_INVALID_ARGUMENT;
  }
  try {
    cfg->cfg.validate();
    return IMMUNET_OK;
  } catch (const immunet::ConfigError& e) {
    put_error(errbuf, errbuf_len, issues_text(e));
    return IMMUNET_ERR_PARSE;
  } catch (const std::exception& e) {
    put_error(errbuf, errbuf_len, e.what());
    return IMMUNET_ERR_RUNTIME;
  }
}

int immunet_config_serialize(const immunet_config* cfg, char** out_text) {
  if (cfg == nullptr) return IMMUNET_ERR_INVALID_ARGUMENT;
  try {
    return deliver_string(cfg->cfg.serialize(), out_text);
  } catch (const std::exception&) {
    return IMMUNET_ERR_RUNTIME;
  }
}

void immunet_config_free(immunet_config* cfg) { delete cfg; }

int immunet_run(const immunet_config* cfg, uint64_t base_seed, uint32_t replicates,
                int parallel, immunet_result** out, char* errbuf, size_t errbuf_len) {
  clear_error(errbuf, errbuf_len);
  if (cfg == nullptr || out == nullptr || replicates == 0) {
    put_error(errbuf, errbuf_len, "null argument or zero replicates");
    return IMMUNET_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  try {
    auto runs = immunet::run_replicates(cfg->cfg, base_seed, replicates, parallel != 0);
    *out = new immunet_result{std::move(runs), base_seed};
    return IMMUNET_OK;
  } catch (const immunet::ConfigError& e) {
    put_error(errbuf, errbuf_len, issues_text(e));
    return IMMUNET_ERR_PARSE;
  } catch (const std::exception& e) {
    put_error(errbuf, errbuf_len, e.what());
    return IMMUNET_ERR_RUNTIME;
  }
}

uint32_t immunet_result_replicates(const immunet_result* res) {
  return res == nullptr ? 0 : static_cast<uint32_t>(res->runs.size());
}

int immunet_result_metrics_csv(const immunet_result* res, uint32_t replicate,
                               char** out_text) {
  if (res == nullptr || replicate >= res->runs.size()) return IMMUNET_ERR_INVALID_ARGUMENT;
  try {
    return deliver_string(immunet::metrics_csv(res->runs[replicate].series), out_text);
  } catch (const std::exception&) {
    return IMMUNET_ERR_RUNTIME;
  }
}

int immunet_result_summary_json(const immunet_result* res, uint32_t replicate,
                                char** out_text) {
  if (res == nullptr || replicate >= res->runs.size()) return IMMUNET_ERR_INVALID_ARGUMENT;
  try {
    return deliver_string(immunet::summary_json(res->runs[replicate].summary), out_text);
  } catch (const std::exception&) {
    return IMMUNET_ERR_RUNTIME;
  }
}

uint64_t immunet_result_state_hash(const immunet_result* res, uint32_t replicate) {
  if (res == nullptr || replicate >= res->runs.size()) return 0;
  return res->runs[replicate].final_state_hash;
}

int immunet_result_write(const immunet_result* res, const char* prefix, char* errbuf,
                         size_t errbuf_len) {
  clear_error(errbuf, errbuf_len);
  if (res == nullptr || prefix == nullptr) {
    put_error(errbuf, errbuf_len, "null argument");
    return IMMUNET_ERR_INVALID_ARGUMENT;
  }
  try {
    std::string base(prefix);
    if (res->runs.size() == 1) {
      immunet::write_text_file(base + ".csv", immunet::metrics_csv(res->runs[0].series));
      immunet::write_text_file(base + ".json", immunet::summary_json(res->runs[0].summary));
      return IMMUNET_OK;
    }
    size_t slash = base.find_last_of('/');
    std::string name = slash == std::string::npos ? base : base.substr(slash + 1);
    std::string index = "{\"replicates\":" + std::to_string(res->runs.size()) +
                        ",\"base_seed\":" + std::to_string(res->base_seed) + ",\"runs\":[";
    for (size_t k = 0; k < res->runs.size(); ++k) {
      std::string stem = base + "_r" + std::to_string(k);
      immunet::write_text_file(stem + ".csv", immunet::metrics_csv(res->runs[k].series));
      immunet::write_text_file(stem + ".json", immunet::summary_json(res->runs[k].summary));
      if (k != 0) index += ',';
      index += "{\"replicate\":" + std::to_string(k) +
               ",\"seed\":" + std::to_string(res->base_seed + k) + ",\"csv\":\"" + name + "_r" +
               std::to_string(k) + ".csv\",\"summary\":\"" + name + "_r" + std::to_string(k) +
               ".json\"}";
    }
    index += "]}\n";
    immunet::write_text_file(base + "_index.json", index);
    return IMMUNET_OK;
  } catch (const std::exception& e) {
    put_error(errbuf, errbuf_len, e.what());
    return IMMUNET_ERR_IO;
  }
}

void immunet_result_free(immunet_result* res) { delete res; }

int immunet_oracle_match(const char* hex_a, const char* hex_b, uint32_t r,
                         int* out_match, char* errbuf, size_t errbuf_len) {
  clear_error(errbuf, errbuf_len);
  if (hex_a == nullptr || hex_b == nullptr || out_match == nullptr) {
    put_error(errbuf, errbuf_len, "null argument");
    return IMMUNET_ERR_INVALID_ARGUMENT;
  }
  try {
    auto a = immunet::BitSignature::from_hex(hex_a);
    auto b = immunet::BitSignature::from_hex(hex_b);
    if (a.length() != b.length()) {
      put_error(errbuf, errbuf_len, "signatures have different lengths");
      return IMMUNET_ERR_PARSE;
    }
    if (r == 0 || r > a.length()) {
      put_error(errbuf, errbuf_len, "r must be in [1, signature length]");
      return IMMUNET_ERR_INVALID_ARGUMENT;
    }
    *out_match = immunet::naive_affinity(a, b) >= static_cast<int>(r) ? 1 : 0;
    return IMMUNET_OK;
  } catch (const std::exception& e) {
    put_error(errbuf, errbuf_len, e.what());
    return IMMUNET_ERR_PARSE;
  }
}

int immunet_topology_dump(const immunet_config* cfg, uint64_t seed, char** out_text,
                          char* errbuf, size_t errbuf_len) {
  clear_error(errbuf, errbuf_len);
  if (cfg == nullptr || out_text == nullptr) {
    put_error(errbuf, errbuf_len, "null argument");
    return IMMUNET_ERR_INVALID_ARGUMENT;
  }
  try {
    cfg->cfg.validate();
    immunet::RngStream rng(seed, immunet::StreamPurpose::Topology, 0);
    auto topo = immunet::build_topology(cfg->cfg, rng);
    return deliver_string(topo.dump_edges(), out_text);
  } catch (const immunet::ConfigError& e) {
    put_error(errbuf, errbuf_len, issues_text(e));
    return IMMUNET_ERR_PARSE;
  } catch (const std::exception& e) {
    put_error(errbuf, errbuf_len, e.what());
    return IMMUNET_ERR_RUNTIME;
  }
}

void immunet_string_free(char* s) { std::free(s); }

}  // extern "C"
