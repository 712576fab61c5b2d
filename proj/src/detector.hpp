#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bitsig.hpp"
#include "rng.hpp"

namespace immunet {

enum class DetectorState : uint8_t { Naive, Effector, Memory };

struct Lineage {
  enum class Kind : uint8_t { Repertoire, Matured, Fragment, Imported };
  Kind kind = Kind::Repertoire;
  uint32_t value = 0;  // Matured: generation; Fragment: window offset; Imported: source host id
};

// A pattern template plus the match radius r: it matches a signature when the
// longest contiguous agreement run reaches r. Fragment detectors carry a
// template shorter than the payload and compare against the aligned window at
// window_offset; full-length detectors use offset 0.
struct Detector {
  BitSignature tmpl;
  uint32_t r = 1;
  DetectorState state = DetectorState::Naive;
  uint64_t expires_at = 0;      // meaningful for Effector only
  uint32_t window_offset = 0;
  Lineage lineage;
  uint32_t affinity_best = 0;   // best affinity this detector has achieved
  uint64_t local_id = 0;        // insertion order within its repertoire

  int affinity_to(const BitSignature& s) const;
  bool matches(const BitSignature& s) const;  // affinity_to(s) >= r

  // Identity for merging: same template content at the same window.
  bool same_template(const Detector& other) const {
    return window_offset == other.window_offset && tmpl == other.tmpl;
  }
};

// Wire form `state r template-as-hex lineage`, e.g.
// `effector 14 9f…e2 matured:2`. Lineage tags: repertoire, matured:<g>,
// fragment:<offset>, imported:<host>. Template length must be a multiple of 4.
std::string detector_to_line(const Detector& d);
Detector detector_from_line(const std::string& line);  // throws std::invalid_argument

struct RepertoireCensus {
  uint32_t naive = 0;
  uint32_t effector = 0;
  uint32_t memory = 0;
};

struct ScanHit {
  uint64_t detector_local_id;
  uint64_t template_hash;
  uint32_t affinity;
  DetectorState state;
};

// An ordered detector collection owned by one node. Scan order is fixed:
// memory first, then effectors, then naive, each class by insertion order.
class Repertoire {
 public:
  uint64_t insert(Detector d);  // returns assigned local id

  // Merge a detector arriving from elsewhere: identical templates keep the
  // better state (Memory > Effector > Naive) and the higher affinity_best;
  // effector expiry is refreshed. New templates are inserted with lineage
  // Imported(from).
  void merge(const Detector& incoming, uint32_t from_host, uint64_t now, uint32_t lifespan);

  // Like merge but for locally minted detectors: a new template keeps the
  // lineage and expiry it arrives with.
  void absorb(Detector d, uint64_t now);

  // First matching detector in scan order, if any. Updates the winner's
  // affinity_best.
  std::optional<ScanHit> scan(const BitSignature& payload);

  void decay(uint64_t now);  // drop expired effectors
  void promote_memory(uint64_t local_id);

  // Keep at most capacity detectors: evict naive before effector, lower
  // affinity_best first, older first. Memory detectors are never evicted.
  void enforce_capacity(uint32_t capacity);

  RepertoireCensus census() const;
  size_t size() const { return items_.size(); }
  const std::vector<Detector>& items() const { return items_; }
  std::vector<Detector>& items() { return items_; }

  // Best detectors for sharing: state Effector or Memory, ranked by
  // affinity_best descending, ties by lower local id.
  std::vector<const Detector*> top_shareable(uint32_t m) const;

  // Best maturation seeds against an antigen: any state, ranked by affinity to
  // the antigen, ties by lower template value then lower local id. Fragment
  // detectors are skipped (their templates are not full-length).
  std::vector<const Detector*> maturation_seeds(const BitSignature& antigen, uint32_t count) const;

 private:
  std::vector<Detector> items_;
  uint64_t next_local_ = 0;
};

// n candidate templates built by concatenating L/w segments drawn uniformly
// from the toolbox. All returned detectors are Naive with the given r.
std::vector<BitSignature> build_toolbox(uint32_t size, uint32_t segment_bits, RngStream& rng);
std::vector<Detector> generate_repertoire(uint32_t n, uint32_t signature_bits, uint32_t r,
                                          const std::vector<BitSignature>& toolbox,
                                          RngStream& rng);

// Exactly the candidates that match no training self signature; order kept.
std::vector<Detector> censor_self(const std::vector<Detector>& candidates,
                                  const std::vector<BitSignature>& self_set);

struct MatureParams {
  uint32_t clones = 24;       // C: clones per survivor per round
  double mutation_rate = 0.02;  // rho: per-bit flip probability
  uint32_t survivors = 6;     // k: kept per round
  uint32_t rounds = 2;        // G
};

struct MatureResult {
  std::vector<Detector> detectors;        // k effectors, lineage Matured(birth round)
  std::vector<uint32_t> best_by_round;    // index 0 = seeds, then one per round
};

// Clonal refinement of seeds against a captured antigen. Each round clones
// every survivor C times, mutates clone bits at rate rho, scores clones and
// unmutated parents by affinity to the antigen and keeps the top k
// (tie-break: lower template value, then earlier pool index). Parents compete,
// so the best affinity never decreases.
MatureResult mature(const std::vector<const Detector*>& seeds, const BitSignature& antigen,
                    const MatureParams& params, RngStream& rng, uint64_t now,
                    uint32_t effector_lifespan);

// k aligned sub-window detectors of width w, offsets evenly spaced from 0
// with stride floor((L-w)/max(1,k-1)), each with r = w.
std::vector<Detector> fragment_antigen(const BitSignature& antigen, uint32_t count,
                                       uint32_t width, uint64_t now, uint32_t effector_lifespan);

}  // namespace immunet
