#include "threat.hpp"

#include <stdexcept>

namespace immunet {

uint32_t StrainRegistry::intern_root(BitSignature genome) {
  if (!strains_.empty()) throw std::logic_error("root strain already seeded");
  return intern(std::move(genome), StrainInfo::kNoParent);
}

uint32_t StrainRegistry::replicate(uint32_t parent_id, double mutation_rate, RngStream& rng) {
  if (parent_id >= strains_.size()) throw std::out_of_range("unknown strain id");
  BitSignature child = strains_[parent_id].genome;
  bool changed = false;
  if (mutation_rate > 0.0) {
    for (uint32_t b = 0; b < child.length(); ++b) {
      if (rng.bernoulli(mutation_rate)) {
        child.flip_bit(b);
        changed = true;
      }
    }
  }
  if (!changed) return parent_id;
  return intern(std::move(child), parent_id);
}

bool StrainRegistry::rooted(uint32_t id) const {
  if (id >= strains_.size()) return false;
  uint32_t cur = id;
  for (uint32_t hops = 0; hops <= strains_.size(); ++hops) {
    uint32_t parent = strains_[cur].parent;
    if (parent == StrainInfo::kNoParent) return cur == 0;
    cur = parent;
  }
  return false;  // cycle — impossible if intern order is respected
}

uint32_t StrainRegistry::intern(BitSignature genome, uint32_t parent) {
  uint64_t h = genome.content_hash();
  auto it = by_hash_.find(h);
  if (it != by_hash_.end()) {
    for (uint32_t id : it->second) {
      if (strains_[id].genome == genome) return id;
    }
  }
  uint32_t id = static_cast<uint32_t>(strains_.size());
  strains_.push_back({id, std::move(genome), parent});
  by_hash_[h].push_back(id);
  return id;
}

BitSignature spam_payload(const BitSignature& genome, const BitSignature& mask) {
  if (genome.length() != mask.length()) throw std::invalid_argument("spam mask length mismatch");
  BitSignature out = genome;
  for (uint32_t i = 0; i < out.length(); ++i) {
    if (mask.bit(i)) out.flip_bit(i);
  }
  return out;
}

}  // namespace immunet
