#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "bitsig.hpp"
#include "rng.hpp"

namespace immunet {

struct StrainInfo {
  uint32_t id;
  BitSignature genome;
  uint32_t parent;  // kNoParent for the root
  static constexpr uint32_t kNoParent = 0xffffffff;
};

// Lineage-unique strain table. Ids are interned by genome content: a
// replication that leaves the genome unchanged reuses the parent id, and a
// mutation that happens to reproduce an existing genome reuses that genome's
// id, so id <-> genome is a bijection and the parent links form a forest
// rooted at the seeded strain.
class StrainRegistry {
 public:
  uint32_t intern_root(BitSignature genome);

  // Child genome = parent genome with independent per-bit flips at
  // mutation_rate. Unchanged genome -> parent id.
  uint32_t replicate(uint32_t parent_id, double mutation_rate, RngStream& rng);

  const StrainInfo& info(uint32_t id) const { return strains_[id]; }
  const BitSignature& genome(uint32_t id) const { return strains_[id].genome; }
  uint32_t count() const { return static_cast<uint32_t>(strains_.size()); }

  // True when following parent links from id reaches the root strain.
  bool rooted(uint32_t id) const;

 private:
  uint32_t intern(BitSignature genome, uint32_t parent);

  std::vector<StrainInfo> strains_;
  std::unordered_map<uint64_t, std::vector<uint32_t>> by_hash_;
};

// Spam carries the strain genome under a fixed scenario-wide mask, so spam
// and malware stay distinct on the wire yet detectable by the same templates.
BitSignature spam_payload(const BitSignature& genome, const BitSignature& mask);

}  // namespace immunet
