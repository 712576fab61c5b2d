/* immunet — deterministic network epidemic / immune-defense simulator.
 *
 * C API over the simulation core. All entry points return an error code;
 * functions that can fail with a message take a caller-owned buffer
 * (errbuf, errbuf_len) which is always NUL-terminated on return, truncating
 * if needed. Strings returned through char** out-parameters are heap
 * allocations owned by the caller; release them with immunet_string_free.
 * Handles are opaque and single-threaded; distinct handles are independent.
 */
#ifndef IMMUNET_H
#define IMMUNET_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define IMMUNET_OK 0
#define IMMUNET_ERR_INVALID_ARGUMENT 1 /* bad handle, pointer, index or value */
#define IMMUNET_ERR_PARSE 2            /* config text or hex input rejected */
#define IMMUNET_ERR_IO 3               /* file could not be read or written */
#define IMMUNET_ERR_RUNTIME 4          /* internal failure during a run */

typedef struct immunet_config immunet_config;
typedef struct immunet_result immunet_result;

/* Library version, static storage. */
const char* immunet_version(void);

/* ---- configuration ---- */

/* New config holding every default. Never fails unless out is NULL. */
int immunet_config_create(immunet_config** out);

/* Parse `section.key = value` text (defaults fill omitted keys) and validate.
 * On IMMUNET_ERR_PARSE the errbuf holds one issue per line. */
int immunet_config_parse(const char* text, immunet_config** out, char* errbuf,
                         size_t errbuf_len);
int immunet_config_parse_file(const char* path, immunet_config** out, char* errbuf,
                              size_t errbuf_len);

/* Set one key from its text form, e.g. ("strain.mutation_rate", "0.02").
 * Semantic cross-checks run at immunet_run / immunet_config_validate time. */
int immunet_config_set(immunet_config* cfg, const char* key, const char* value,
                       char* errbuf, size_t errbuf_len);

/* Text form of one key's current value (owned by the caller). */
int immunet_config_get(const immunet_config* cfg, const char* key, char** out_value,
                       char* errbuf, size_t errbuf_len);

/* Full semantic validation; IMMUNET_ERR_PARSE with issues on failure. */
int immunet_config_validate(const immunet_config* cfg, char* errbuf, size_t errbuf_len);

/* Canonical text form of the config (round-trips through parse). */
int immunet_config_serialize(const immunet_config* cfg, char** out_text);

void immunet_config_free(immunet_config* cfg);

/* ---- running ---- */

/* Run `replicates` runs; replicate k uses seed base_seed + k. parallel != 0
 * runs replicates on worker threads (outputs are identical to the serial
 * schedule). replicates must be >= 1. */
int immunet_run(const immunet_config* cfg, uint64_t base_seed, uint32_t replicates,
                int parallel, immunet_result** out, char* errbuf, size_t errbuf_len);

uint32_t immunet_result_replicates(const immunet_result* res);

/* Per-step metrics table as CSV (header + one row per completed step). */
int immunet_result_metrics_csv(const immunet_result* res, uint32_t replicate,
                               char** out_text);

/* Run summary as a single JSON object. */
int immunet_result_summary_json(const immunet_result* res, uint32_t replicate,
                                char** out_text);

/* Digest of the full end-of-run world state; equal seeds and configs give
 * equal digests. Returns 0 on a bad handle or index. */
uint64_t immunet_result_state_hash(const immunet_result* res, uint32_t replicate);

/* Write outputs under a path prefix. One replicate: <prefix>.csv and
 * <prefix>.json. Several: <prefix>_r<k>.csv / _r<k>.json per replicate plus
 * <prefix>_index.json describing the set. */
int immunet_result_write(const immunet_result* res, const char* prefix, char* errbuf,
                         size_t errbuf_len);

void immunet_result_free(immunet_result* res);

/* ---- small utilities ---- */

/* Reference pattern match: *out_match = 1 iff the longest contiguous run of
 * positionwise bit agreement between the two equal-length hex signatures
 * reaches r. Uses the independent reference scan, not the optimized matcher. */
int immunet_oracle_match(const char* hex_a, const char* hex_b, uint32_t r,
                         int* out_match, char* errbuf, size_t errbuf_len);

/* The network edge list ("u v" per line) that the given config and seed
 * produce. */
int immunet_topology_dump(const immunet_config* cfg, uint64_t seed, char** out_text,
                          char* errbuf, size_t errbuf_len);

void immunet_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IMMUNET_H */
