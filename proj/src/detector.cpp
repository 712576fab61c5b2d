#include "detector.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace immunet {

namespace {

int state_rank(DetectorState s) {
  switch (s) {
    case DetectorState::Naive: return 0;
    case DetectorState::Effector: return 1;
    case DetectorState::Memory: return 2;
  }
  return 0;
}

const char* state_name(DetectorState s) {
  switch (s) {
    case DetectorState::Naive: return "naive";
    case DetectorState::Effector: return "effector";
    case DetectorState::Memory: return "memory";
  }
  return "?";
}

}  // namespace

int Detector::affinity_to(const BitSignature& s) const {
  if (window_offset == 0 && tmpl.length() == s.length()) {
    return affinity(tmpl, s);
  }
  if (static_cast<uint64_t>(window_offset) + tmpl.length() > s.length()) return 0;
  return affinity(tmpl, s.window(window_offset, tmpl.length()));
}

bool Detector::matches(const BitSignature& s) const {
  return affinity_to(s) >= static_cast<int>(r);
}

std::string detector_to_line(const Detector& d) {
  std::string out = state_name(d.state);
  out += ' ';
  out += std::to_string(d.r);
  out += ' ';
  out += d.tmpl.to_hex();
  out += ' ';
  switch (d.lineage.kind) {
    case Lineage::Kind::Repertoire: out += "repertoire"; break;
    case Lineage::Kind::Matured: out += "matured:" + std::to_string(d.lineage.value); break;
    case Lineage::Kind::Fragment: out += "fragment:" + std::to_string(d.lineage.value); break;
    case Lineage::Kind::Imported: out += "imported:" + std::to_string(d.lineage.value); break;
  }
  return out;
}

Detector detector_from_line(const std::string& line) {
  std::vector<std::string> parts;
  size_t pos = 0;
  while (pos < line.size()) {
    size_t sp = line.find(' ', pos);
    if (sp == std::string::npos) sp = line.size();
    if (sp > pos) parts.emplace_back(line.substr(pos, sp - pos));
    pos = sp + 1;
  }
  if (parts.size() != 4) throw std::invalid_argument("detector line must have 4 fields");

  Detector d;
  if (parts[0] == "naive") {
    d.state = DetectorState::Naive;
  } else if (parts[0] == "effector") {
    d.state = DetectorState::Effector;
  } else if (parts[0] == "memory") {
    d.state = DetectorState::Memory;
  } else {
    throw std::invalid_argument("unknown detector state '" + parts[0] + "'");
  }

  uint32_t r = 0;
  auto [p, ec] = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), r);
  if (ec != std::errc{} || p != parts[1].data() + parts[1].size() || r < 1) {
    throw std::invalid_argument("bad match radius '" + parts[1] + "'");
  }
  d.r = r;
  d.tmpl = BitSignature::from_hex(parts[2]);
  if (d.r > d.tmpl.length()) throw std::invalid_argument("match radius exceeds template length");
  d.affinity_best = d.r;

  const std::string& tag = parts[3];
  auto tag_value = [&tag](size_t colon) {
    uint32_t v = 0;
    const char* b = tag.data() + colon + 1;
    const char* e = tag.data() + tag.size();
    auto [pp, eec] = std::from_chars(b, e, v);
    if (eec != std::errc{} || pp != e) throw std::invalid_argument("bad lineage value in '" + tag + "'");
    return v;
  };
  if (tag == "repertoire") {
    d.lineage = {Lineage::Kind::Repertoire, 0};
  } else if (tag.rfind("matured:", 0) == 0) {
    d.lineage = {Lineage::Kind::Matured, tag_value(7)};
  } else if (tag.rfind("fragment:", 0) == 0) {
    d.lineage = {Lineage::Kind::Fragment, tag_value(8)};
    d.window_offset = d.lineage.value;
  } else if (tag.rfind("imported:", 0) == 0) {
    d.lineage = {Lineage::Kind::Imported, tag_value(8)};
  } else {
    throw std::invalid_argument("unknown lineage tag '" + tag + "'");
  }
  return d;
}

uint64_t Repertoire::insert(Detector d) {
  d.local_id = next_local_++;
  items_.push_back(std::move(d));
  return items_.back().local_id;
}

void Repertoire::merge(const Detector& incoming, uint32_t from_host, uint64_t now,
                       uint32_t lifespan) {
  Detector copy = incoming;
  copy.lineage = {Lineage::Kind::Imported, from_host};
  if (copy.state == DetectorState::Effector) copy.expires_at = now + lifespan;
  absorb(std::move(copy), now);
}

void Repertoire::absorb(Detector incoming, uint64_t now) {
  (void)now;
  for (auto& d : items_) {
    if (!d.same_template(incoming)) continue;
    if (state_rank(incoming.state) > state_rank(d.state)) d.state = incoming.state;
    d.affinity_best = std::max(d.affinity_best, incoming.affinity_best);
    if (d.state == DetectorState::Effector) {
      d.expires_at = std::max(d.expires_at, incoming.expires_at);
    }
    return;
  }
  insert(std::move(incoming));
}

std::optional<ScanHit> Repertoire::scan(const BitSignature& payload) {
  for (DetectorState cls : {DetectorState::Memory, DetectorState::Effector, DetectorState::Naive}) {
    for (auto& d : items_) {  // items_ is insertion-ordered, so local ids ascend
      if (d.state != cls) continue;
      int aff = d.affinity_to(payload);
      if (aff >= static_cast<int>(d.r)) {
        d.affinity_best = std::max<uint32_t>(d.affinity_best, static_cast<uint32_t>(aff));
        return ScanHit{d.local_id, d.tmpl.content_hash(), static_cast<uint32_t>(aff), d.state};
      }
    }
  }
  return std::nullopt;
}

void Repertoire::decay(uint64_t now) {
  items_.erase(std::remove_if(items_.begin(), items_.end(),
                              [now](const Detector& d) {
                                return d.state == DetectorState::Effector && d.expires_at <= now;
                              }),
               items_.end());
}

void Repertoire::promote_memory(uint64_t local_id) {
  for (auto& d : items_) {
    if (d.local_id == local_id) {
      d.state = DetectorState::Memory;
      return;
    }
  }
}

void Repertoire::enforce_capacity(uint32_t capacity) {
  while (items_.size() > capacity) {
    size_t victim = items_.size();
    for (size_t i = 0; i < items_.size(); ++i) {
      const Detector& d = items_[i];
      if (d.state == DetectorState::Memory) continue;
      if (victim == items_.size()) {
        victim = i;
        continue;
      }
      const Detector& w = items_[victim];
      auto key = [](const Detector& x) {
        return std::tuple(state_rank(x.state), x.affinity_best, x.local_id);
      };
      if (key(d) < key(w)) victim = i;
    }
    if (victim == items_.size()) break;  // all memory: allow overflow
    items_.erase(items_.begin() + victim);
  }
}

RepertoireCensus Repertoire::census() const {
  RepertoireCensus c;
  for (const auto& d : items_) {
    switch (d.state) {
      case DetectorState::Naive: ++c.naive; break;
      case DetectorState::Effector: ++c.effector; break;
      case DetectorState::Memory: ++c.memory; break;
    }
  }
  return c;
}

std::vector<const Detector*> Repertoire::top_shareable(uint32_t m) const {
  std::vector<const Detector*> out;
  for (const auto& d : items_) {
    if (d.state == DetectorState::Effector || d.state == DetectorState::Memory) {
      out.push_back(&d);
    }
  }
  std::sort(out.begin(), out.end(), [](const Detector* a, const Detector* b) {
    if (a->affinity_best != b->affinity_best) return a->affinity_best > b->affinity_best;
    return a->local_id < b->local_id;
  });
  if (out.size() > m) out.resize(m);
  return out;
}

std::vector<const Detector*> Repertoire::maturation_seeds(const BitSignature& antigen,
                                                          uint32_t count) const {
  struct Scored {
    const Detector* d;
    int aff;
  };
  std::vector<Scored> scored;
  for (const auto& d : items_) {
    if (d.window_offset != 0 || d.tmpl.length() != antigen.length()) continue;
    scored.push_back({&d, affinity(d.tmpl, antigen)});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.aff != b.aff) return a.aff > b.aff;
    int c = a.d->tmpl.compare(b.d->tmpl);
    if (c != 0) return c < 0;
    return a.d->local_id < b.d->local_id;
  });
  if (scored.size() > count) scored.resize(count);
  std::vector<const Detector*> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.d);
  return out;
}

std::vector<BitSignature> build_toolbox(uint32_t size, uint32_t segment_bits, RngStream& rng) {
  std::vector<BitSignature> toolbox;
  toolbox.reserve(size);
  for (uint32_t i = 0; i < size; ++i) {
    BitSignature seg(segment_bits);
    for (uint32_t b = 0; b < segment_bits; ++b) seg.set_bit(b, rng.bernoulli(0.5));
    toolbox.push_back(std::move(seg));
  }
  return toolbox;
}

std::vector<Detector> generate_repertoire(uint32_t n, uint32_t signature_bits, uint32_t r,
                                          const std::vector<BitSignature>& toolbox,
                                          RngStream& rng) {
  if (toolbox.empty()) throw std::invalid_argument("segment toolbox is empty");
  uint32_t segment_bits = toolbox.front().length();
  if (segment_bits == 0 || signature_bits % segment_bits != 0) {
    throw std::invalid_argument("segment width must divide the signature length");
  }
  uint32_t segments = signature_bits / segment_bits;
  std::vector<Detector> out;
  out.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    BitSignature tmpl(signature_bits);
    for (uint32_t s = 0; s < segments; ++s) {
      tmpl.set_window(s * segment_bits, toolbox[rng.below(toolbox.size())]);
    }
    Detector d;
    d.tmpl = std::move(tmpl);
    d.r = r;
    d.state = DetectorState::Naive;
    d.lineage = {Lineage::Kind::Repertoire, 0};
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Detector> censor_self(const std::vector<Detector>& candidates,
                                  const std::vector<BitSignature>& self_set) {
  std::vector<Detector> out;
  for (const auto& d : candidates) {
    bool self_reactive = false;
    for (const auto& s : self_set) {
      if (d.matches(s)) {
        self_reactive = true;
        break;
      }
    }
    if (!self_reactive) out.push_back(d);
  }
  return out;
}

MatureResult mature(const std::vector<const Detector*>& seeds, const BitSignature& antigen,
                    const MatureParams& params, RngStream& rng, uint64_t now,
                    uint32_t effector_lifespan) {
  if (seeds.empty()) throw std::invalid_argument("maturation requires at least one seed");

  struct Entry {
    BitSignature tmpl;
    uint32_t r;
    uint32_t generation;
    int aff;
  };
  std::vector<Entry> survivors;
  survivors.reserve(seeds.size());
  for (const Detector* s : seeds) {
    survivors.push_back({s->tmpl, s->r, 0, affinity(s->tmpl, antigen)});
  }

  MatureResult result;
  auto best_affinity = [](const std::vector<Entry>& v) {
    int best = 0;
    for (const auto& e : v) best = std::max(best, e.aff);
    return static_cast<uint32_t>(best);
  };
  result.best_by_round.push_back(best_affinity(survivors));

  const uint32_t L = antigen.length();
  for (uint32_t round = 1; round <= params.rounds; ++round) {
    std::vector<Entry> pool = survivors;  // unmutated parents compete (elitism)
    for (const auto& parent : survivors) {
      for (uint32_t c = 0; c < params.clones; ++c) {
        Entry clone{parent.tmpl, parent.r, round, 0};
        for (uint32_t b = 0; b < L; ++b) {
          if (rng.bernoulli(params.mutation_rate)) clone.tmpl.flip_bit(b);
        }
        clone.aff = affinity(clone.tmpl, antigen);
        pool.push_back(std::move(clone));
      }
    }
    std::vector<size_t> order(pool.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&pool](size_t a, size_t b) {
      if (pool[a].aff != pool[b].aff) return pool[a].aff > pool[b].aff;
      int c = pool[a].tmpl.compare(pool[b].tmpl);
      if (c != 0) return c < 0;
      return a < b;  // earlier pool index
    });
    size_t keep = std::min<size_t>(params.survivors, order.size());
    std::vector<Entry> next;
    next.reserve(keep);
    for (size_t i = 0; i < keep; ++i) next.push_back(pool[order[i]]);
    survivors = std::move(next);
    result.best_by_round.push_back(best_affinity(survivors));
  }

  result.detectors.reserve(survivors.size());
  for (const auto& e : survivors) {
    Detector d;
    d.tmpl = e.tmpl;
    d.r = e.r;
    d.state = DetectorState::Effector;
    d.expires_at = now + effector_lifespan;
    d.lineage = {Lineage::Kind::Matured, e.generation};
    d.affinity_best = static_cast<uint32_t>(e.aff);
    result.detectors.push_back(std::move(d));
  }
  return result;
}

std::vector<Detector> fragment_antigen(const BitSignature& antigen, uint32_t count,
                                       uint32_t width, uint64_t now,
                                       uint32_t effector_lifespan) {
  if (width > antigen.length()) throw std::invalid_argument("fragment width exceeds signature length");
  if (count == 0) return {};
  uint32_t stride = count > 1 ? (antigen.length() - width) / (count - 1) : 0;
  std::vector<Detector> out;
  out.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    uint32_t offset = i * stride;
    Detector d;
    d.tmpl = antigen.window(offset, width);
    d.r = width;  // exact sub-window match
    d.state = DetectorState::Effector;
    d.expires_at = now + effector_lifespan;
    d.window_offset = offset;
    d.lineage = {Lineage::Kind::Fragment, offset};
    d.affinity_best = width;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace immunet
