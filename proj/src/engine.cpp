#include "engine.hpp"

#include <algorithm>
#include <future>
#include <set>

namespace immunet {

namespace {

void fold(uint64_t& h, uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xff;
    h *= 0x100000001b3ull;
  }
}

}  // namespace

World::World(const ScenarioConfig& cfg, uint64_t seed, uint8_t label_cipher)
    : cfg_(cfg), seed_(seed), label_cipher_(static_cast<uint8_t>(label_cipher % 5)),
      blacklist_(cfg.defense.blacklist.threshold) {
  cfg_.validate();
  cfg_.run.seed = seed;

  // Scenario-wide secrets and constants. Draw order here is part of the
  // determinism contract (see README).
  {
    RngStream tokens(seed, StreamPurpose::Tokens, 0);
    valid_token_ = tokens.next_u64();
    if (valid_token_ == 0) valid_token_ = 1;
  }
  {
    RngStream mask_rng(seed, StreamPurpose::Tokens, 1);
    spam_mask_ = BitSignature(cfg_.world.signature_bits);
    for (uint32_t i = 0; i < cfg_.world.signature_bits; ++i) {
      spam_mask_.set_bit(i, mask_rng.bernoulli(0.5));
    }
  }
  {
    BitSignature genome;
    if (cfg_.strain.genome == "random") {
      RngStream genome_rng(seed, StreamPurpose::Strain, 0);
      genome = BitSignature(cfg_.world.signature_bits);
      for (uint32_t i = 0; i < cfg_.world.signature_bits; ++i) {
        genome.set_bit(i, genome_rng.bernoulli(0.5));
      }
    } else {
      genome = BitSignature::from_hex(cfg_.strain.genome);
    }
    root_strain_ = strains_.intern_root(std::move(genome));
  }

  {
    RngStream topo_rng(seed, StreamPurpose::Topology, 0);
    topo_ = build_topology(cfg_, topo_rng);
  }
  {
    RngStream self_rng(seed, StreamPurpose::SelfModel, 0);
    self_ = build_self_model(cfg_, self_rng);
  }
  {
    RngStream train_rng(seed, StreamPurpose::SelfTraining, 0);
    self_training_.reserve(cfg_.self.training_samples);
    for (uint32_t i = 0; i < cfg_.self.training_samples; ++i) {
      self_training_.push_back(self_.sample(train_rng));
    }
  }
  {
    RngStream toolbox_rng(seed, StreamPurpose::Toolbox, 0);
    toolbox_ = build_toolbox(cfg_.defense.detector.toolbox, cfg_.defense.detector.segment_bits,
                             toolbox_rng);
  }

  const uint32_t n = topo_.node_count();
  hosts_.resize(n);
  arrivals_.resize(n);
  legit_rng_.reserve(n);
  emission_rng_.reserve(n);
  mutation_rng_.reserve(n);
  infection_rng_.reserve(n);
  gossip_rng_.reserve(n);
  securityware_rng_.reserve(n);
  maturation_rng_.reserve(n);
  for (uint32_t id = 0; id < n; ++id) {
    legit_rng_.emplace_back(seed, StreamPurpose::LegitTraffic, id);
    emission_rng_.emplace_back(seed, StreamPurpose::Emission, id);
    mutation_rng_.emplace_back(seed, StreamPurpose::Mutation, id);
    infection_rng_.emplace_back(seed, StreamPurpose::Infection, id);
    gossip_rng_.emplace_back(seed, StreamPurpose::Gossip, id);
    securityware_rng_.emplace_back(seed, StreamPurpose::Securityware, id);
    maturation_rng_.emplace_back(seed, StreamPurpose::Maturation, id);

    Host& h = hosts_[id];
    h.id = id;
    h.kind = topo_.kind(id);
    h.emission_ring.assign(cfg_.defense.regulation.window, 0);
    if (h.kind == NodeKind::Endpoint) {
      h.vulnerability = cfg_.world.vulnerability;
    } else if (h.kind == NodeKind::Router && cfg_.world.routers_infectable) {
      h.vulnerability = cfg_.world.vulnerability;
    }
  }

  // Adoption draws: one stream per layer so enabling one architecture never
  // reshuffles another's adopter set across paired runs.
  if (cfg_.has(Architecture::Barrier)) {
    RngStream adopt(seed, StreamPurpose::Adoption, 1);
    for (uint32_t id : topo_.endpoint_ids) {
      hosts_[id].adopts.barrier = adopt.bernoulli(cfg_.defense.barrier.adoption);
    }
  }
  if (cfg_.has(Architecture::Blacklist)) {
    RngStream adopt(seed, StreamPurpose::Adoption, 2);
    for (uint32_t id : topo_.endpoint_ids) {
      hosts_[id].adopts.blacklist = adopt.bernoulli(cfg_.defense.blacklist.adoption);
    }
  }
  const bool scanner_layer =
      cfg_.has(Architecture::Endpoint) || cfg_.has(Architecture::P2pSecurityware);
  if (scanner_layer) {
    RngStream adopt(seed, StreamPurpose::Adoption, 3);
    for (uint32_t id : topo_.endpoint_ids) {
      if (adopt.bernoulli(cfg_.defense.endpoint.adoption)) {
        install_security_stack(hosts_[id]);
      }
    }
  }
  if (cfg_.has(Architecture::RouterFilter)) {
    for (uint32_t id : topo_.router_ids) {
      Host& r = hosts_[id];
      r.adopts.scanner = true;
      r.repertoire = make_repertoire(id);
      if (cfg_.defense.router_filter.preseed_strain_detector) {
        Detector d;
        d.tmpl = strains_.genome(root_strain_);
        d.r = cfg_.defense.detector.match_radius;
        d.state = DetectorState::Memory;
        d.lineage = {Lineage::Kind::Repertoire, 0};
        d.affinity_best = d.tmpl.length();
        r.repertoire->insert(std::move(d));
      }
    }
  }
  if (cfg_.defense.lymph.enabled) {
    for (uint32_t id : topo_.lymph_ids) {
      hosts_[id].repertoire = make_repertoire(id);
      lymph_.push_back(LymphNode{id, {}, 0});
    }
  }

  seed_initial_infections();
}

Repertoire World::make_repertoire(uint32_t node_id) {
  RngStream rng(seed_, StreamPurpose::Repertoire, node_id);
  auto candidates = generate_repertoire(cfg_.defense.detector.repertoire, cfg_.world.signature_bits,
                                        cfg_.defense.detector.match_radius, toolbox_, rng);
  auto censored = censor_self(candidates, self_training_);
  Repertoire rep;
  for (auto& d : censored) rep.insert(std::move(d));
  return rep;
}

void World::install_security_stack(Host& host) {
  host.adopts.scanner = true;
  if (cfg_.has(Architecture::P2pSecurityware)) host.adopts.securityware = true;
  if (!host.repertoire.has_value()) host.repertoire = make_repertoire(host.id);
}

void World::seed_initial_infections() {
  if (topo_.endpoint_ids.empty()) return;
  if (cfg_.strain.initial_prevalence > 0.0) {
    RngStream prevalence(seed_, StreamPurpose::Adoption, 4);
    for (uint32_t id : topo_.endpoint_ids) {
      if (prevalence.bernoulli(cfg_.strain.initial_prevalence)) {
        force_infect(id, root_strain_, 0, true);
      }
    }
    return;
  }
  uint32_t patient_zero = cfg_.run.patient_zero >= 0
                              ? static_cast<uint32_t>(cfg_.run.patient_zero)
                              : topo_.endpoint_ids.front();
  force_infect(patient_zero, root_strain_, 0, true);
}

void World::force_infect(uint32_t host_id, uint32_t strain, uint64_t packet_id, bool seeded) {
  Host& h = hosts_[host_id];
  h.state = HostState::Infected;
  h.strain = strain;
  h.strain_active = true;
  h.infected_since = step_;
  infections_.push_back({step_, host_id, strain, packet_id, seeded});
}

Packet World::make_packet(uint32_t src, uint32_t dst, PacketClass klass, BitSignature payload) {
  Packet p;
  p.id = next_packet_id_++;
  p.src = src;
  p.dst = dst;
  p.at = src;
  p.hops_remaining = cfg_.run.ttl;
  p.payload = std::move(payload);
  p.klass = static_cast<PacketClass>((static_cast<uint8_t>(klass) + label_cipher_) % 5);
  return p;
}

void World::emit(Packet p) {
  ++current_ledger_.created;
  switch (true_class(p)) {
    case PacketClass::Legit: ++totals_.legit_sent; break;
    case PacketClass::Spam: ++totals_.spam_sent; break;
    case PacketClass::Malware: ++totals_.malware_sent; break;
    case PacketClass::Securityware: ++totals_.securityware_packets; break;
    case PacketClass::Control: ++totals_.control_packets; break;
  }
  in_flight_.push_back(std::move(p));
}

void World::block_packet(const Packet& p) {
  ++current_ledger_.blocked;
  switch (true_class(p)) {
    case PacketClass::Legit: ++totals_.legit_blocked; break;
    case PacketClass::Spam: ++totals_.spam_blocked; break;
    case PacketClass::Malware: ++totals_.malware_blocked; break;
    default: break;  // securityware/control losses tracked only in the ledger
  }
}

void World::count_delivered(const Packet& p) {
  ++current_ledger_.delivered;
  switch (true_class(p)) {
    case PacketClass::Legit: ++totals_.legit_delivered; break;
    case PacketClass::Spam: ++totals_.spam_delivered; break;
    case PacketClass::Malware: ++totals_.malware_delivered; break;
    default: break;
  }
}

bool World::damage_flag(uint32_t host_id) const {
  return hosts_[host_id].damage_level() >= cfg_.defense.regulation.damage_threshold;
}

uint32_t World::draw_endpoint_target(RngStream& rng, uint32_t exclude) const {
  const auto& eps = topo_.endpoint_ids;
  if (eps.empty()) return Topology::kNone;
  bool excluded = exclude != Topology::kNone && exclude < topo_.node_count() &&
                  topo_.kind(exclude) == NodeKind::Endpoint;
  if (!excluded) return eps[rng.below(eps.size())];
  if (eps.size() == 1) return Topology::kNone;
  // The excluded slot redirects to the last endpoint, which is otherwise
  // outside the draw range, so every other endpoint keeps equal weight.
  uint32_t chosen = eps[rng.below(eps.size() - 1)];
  if (chosen == exclude) chosen = eps.back();
  return chosen;
}

void World::capture_antigen(uint32_t observer, const BitSignature& payload) {
  if (!cfg_.defense.lymph.enabled || topo_.lymph_ids.empty()) return;
  Host& obs = hosts_[observer];
  uint64_t hash = payload.content_hash();
  if (obs.remembers_capture(hash)) return;
  obs.remember_capture(hash, cfg_.defense.lymph.capture_dedupe);

  uint32_t target = topo_.nearest_lymph(observer);
  if (target == Topology::kNone || target == observer) return;
  Packet p = make_packet(observer, target, PacketClass::Control, payload);
  p.port = Port::Service;
  p.token = valid_token_;
  p.control = ControlKind::AntigenCapture;
  emit(std::move(p));
}

void World::phase_reinjection() {
  for (auto& h : hosts_) h.rotate_emission_ring();

  if (!reinject_scheduled_ || reinject_done_ || step_ != reinject_at_) return;
  reinject_scheduled_ = false;
  reinject_done_ = true;
  uint32_t target = Topology::kNone;
  uint32_t preferred = cfg_.run.patient_zero >= 0 ? static_cast<uint32_t>(cfg_.run.patient_zero)
                                                  : (topo_.endpoint_ids.empty()
                                                         ? Topology::kNone
                                                         : topo_.endpoint_ids.front());
  if (preferred != Topology::kNone && hosts_[preferred].state == HostState::Clean) {
    target = preferred;
  } else {
    for (uint32_t id : topo_.endpoint_ids) {
      if (hosts_[id].state == HostState::Clean) {
        target = id;
        break;
      }
    }
  }
  if (target != Topology::kNone) force_infect(target, root_strain_, 0, true);
}

void World::phase_legit() {
  if (cfg_.traffic.legit_rate <= 0.0 || topo_.endpoint_ids.size() < 2) return;
  for (uint32_t id : topo_.endpoint_ids) {
    Host& h = hosts_[id];
    if (h.state == HostState::Quarantined) continue;
    RngStream& rng = legit_rng_[id];
    uint64_t count = rng.rate_count(cfg_.traffic.legit_rate);
    for (uint64_t i = 0; i < count; ++i) {
      BitSignature payload = self_.sample(rng);
      uint32_t chosen = draw_endpoint_target(rng, id);
      if (chosen == Topology::kNone) continue;
      Packet p = make_packet(id, chosen, PacketClass::Legit, std::move(payload));
      emit(std::move(p));
    }
  }
}

void World::phase_malicious() {
  if (topo_.endpoint_ids.empty()) return;
  for (auto& h : hosts_) {
    if (h.state != HostState::Infected) continue;
    RngStream& rng = emission_rng_[h.id];
    uint64_t emissions = 0;

    uint64_t fanout = rng.rate_count(cfg_.strain.fanout);
    for (uint64_t i = 0; i < fanout; ++i) {
      bool is_malware = rng.bernoulli(cfg_.strain.malware_fraction);
      uint32_t target = draw_endpoint_target(rng, h.id);
      if (target == Topology::kNone) continue;  // single-endpoint world: nowhere to send
      if (is_malware) {
        uint32_t child = strains_.replicate(h.strain, cfg_.strain.mutation_rate, mutation_rng_[h.id]);
        Packet p = make_packet(h.id, target, PacketClass::Malware, strains_.genome(child));
        p.strain = child;
        emit(std::move(p));
      } else {
        Packet p = make_packet(h.id, target, PacketClass::Spam,
                               spam_payload(strains_.genome(h.strain), spam_mask_));
        p.strain = h.strain;
        emit(std::move(p));
      }
      ++emissions;
    }

    uint64_t extra_spam = rng.rate_count(cfg_.traffic.spam_multiplier * cfg_.traffic.legit_rate);
    for (uint64_t i = 0; i < extra_spam; ++i) {
      uint32_t target = draw_endpoint_target(rng, h.id);
      if (target == Topology::kNone) continue;
      Packet p = make_packet(h.id, target, PacketClass::Spam,
                             spam_payload(strains_.genome(h.strain), spam_mask_));
      p.strain = h.strain;
      emit(std::move(p));
      ++emissions;
    }

    uint64_t forged = rng.rate_count(cfg_.strain.forge_control_rate);
    for (uint64_t i = 0; i < forged; ++i) {
      uint32_t suspect = topo_.endpoint_ids[rng.below(topo_.endpoint_ids.size())];
      uint32_t target = topo_.endpoint_ids[rng.below(topo_.endpoint_ids.size())];
      Packet p = make_packet(h.id, target, PacketClass::Control,
                             spam_payload(strains_.genome(h.strain), spam_mask_));
      p.port = Port::Service;
      p.token = valid_token_ ^ (rng.next_u64() | 1);  // never the valid token
      p.control = ControlKind::AlertReport;
      p.alert_suspect = suspect;
      emit(std::move(p));
      ++emissions;
    }

    h.note_emissions(static_cast<uint32_t>(emissions));
  }
}

void World::phase_security() {
  // Router/lymph detector gossip rides the backbone when content filtering is
  // deployed there.
  if (cfg_.has(Architecture::RouterFilter)) {
    auto gossip_from = [this](uint32_t id) {
      Host& h = hosts_[id];
      if (!h.repertoire.has_value()) return;
      auto share = h.repertoire->top_shareable(cfg_.defense.gossip.share_top);
      if (share.empty()) return;
      RngStream& rng = gossip_rng_[id];
      for (uint32_t nbr : topo_.adjacency[id]) {
        NodeKind k = topo_.kind(nbr);
        if (k == NodeKind::Endpoint) continue;
        if (!rng.bernoulli(cfg_.defense.gossip.probability)) continue;
        Packet p = make_packet(id, nbr, PacketClass::Control, BitSignature(1));
        p.port = Port::Service;
        p.token = valid_token_;
        p.control = ControlKind::DetectorShare;
        p.carried.reserve(share.size());
        for (const Detector* d : share) p.carried.push_back(*d);
        emit(std::move(p));
      }
    };
    for (uint32_t id : topo_.router_ids) gossip_from(id);
    for (uint32_t id : topo_.lymph_ids) gossip_from(id);
  }

  // Securityware pushes: adopters offer installs (carrying their best
  // detectors) to uniformly chosen endpoints; an offer landing on an existing
  // adopter acts as a plain detector share.
  if (cfg_.has(Architecture::P2pSecurityware) && topo_.endpoint_ids.size() > 1) {
    for (uint32_t id : topo_.endpoint_ids) {
      Host& h = hosts_[id];
      if (!h.adopts.securityware || h.state == HostState::Quarantined) continue;
      RngStream& rng = securityware_rng_[id];
      if (!rng.bernoulli(cfg_.defense.securityware.push_rate)) continue;
      uint32_t target = draw_endpoint_target(rng, id);
      if (target == Topology::kNone) continue;
      Packet p = make_packet(id, target, PacketClass::Securityware, BitSignature(1));
      p.token = valid_token_;
      p.installer = true;
      if (h.repertoire.has_value()) {
        auto share = h.repertoire->top_shareable(cfg_.defense.gossip.share_top);
        p.carried.reserve(share.size());
        for (const Detector* d : share) p.carried.push_back(*d);
      }
      emit(std::move(p));
    }
  }
}

void World::phase_routing() {
  const bool filter_on = cfg_.has(Architecture::RouterFilter);
  const size_t n = in_flight_.size();  // packets minted later this step wait a step
  std::vector<uint8_t> keep(n, 1);

  for (size_t i = 0; i < n; ++i) {
    // Work on a copy: captures emitted below may reallocate in_flight_.
    Packet p = std::move(in_flight_[i]);
    uint32_t nh = topo_.next_hop(p.at, p.dst);
    if (nh == Topology::kNone || p.hops_remaining == 0) {
      ++current_ledger_.expired;
      keep[i] = 0;
      continue;
    }
    p.at = nh;
    --p.hops_remaining;

    if (p.at == p.dst) {
      keep[i] = 0;
      arrivals_[p.dst].push_back(std::move(p));
      continue;
    }

    if (filter_on && topo_.kind(p.at) == NodeKind::Router && p.token != valid_token_) {
      Host& router = hosts_[p.at];
      if (router.repertoire.has_value()) {
        auto hit = router.repertoire->scan(p.payload);
        if (hit.has_value()) {
          block_packet(p);
          blacklist_.report(p.at, p.src);
          signals_.add_match(p.src, {step_, p.at, hit->template_hash, p.at, hit->detector_local_id});
          capture_antigen(p.at, p.payload);
          keep[i] = 0;
          continue;
        }
      }
    }
    in_flight_[i] = std::move(p);
  }

  size_t write = 0;
  for (size_t i = 0; i < in_flight_.size(); ++i) {
    if (i < n && !keep[i]) continue;
    if (write != i) in_flight_[write] = std::move(in_flight_[i]);
    ++write;
  }
  in_flight_.resize(write);
}

void World::phase_delivery() {
  for (uint32_t dst = 0; dst < topo_.node_count(); ++dst) {
    auto& queue = arrivals_[dst];
    if (queue.empty()) continue;
    Host& h = hosts_[dst];
    for (Packet& p : queue) {
      if (h.state == HostState::Quarantined) {
        block_packet(p);
        continue;
      }
      if (cfg_.has(Architecture::Barrier) && h.adopts.barrier &&
          !barrier_admit(h, view_of(p), valid_token_)) {
        block_packet(p);
        continue;
      }
      if (cfg_.has(Architecture::Blacklist) && h.adopts.blacklist && blacklist_.blocks(p.src)) {
        block_packet(p);
        continue;
      }
      if (h.adopts.scanner && h.repertoire.has_value() && p.token != valid_token_) {
        auto hit = h.repertoire->scan(p.payload);
        if (hit.has_value()) {
          block_packet(p);
          blacklist_.report(dst, p.src);
          signals_.add_match(p.src, {step_, dst, hit->template_hash, dst, hit->detector_local_id});
          capture_antigen(dst, p.payload);
          continue;
        }
      }

      count_delivered(p);
      switch (true_class(p)) {
        case PacketClass::Legit:
        case PacketClass::Spam:
          break;
        case PacketClass::Malware:
          pending_infections_.push_back({dst, p.strain, p.id});
          break;
        case PacketClass::Securityware:
          deliver_securityware(h, p);
          break;
        case PacketClass::Control:
          handle_control(h, p);
          break;
      }
    }
    queue.clear();
  }
}

void World::deliver_securityware(Host& h, const Packet& p) {
  if (h.kind != NodeKind::Endpoint) return;
  if (!p.installer || p.token != valid_token_) return;
  if (!h.adopts.scanner) {
    if (!securityware_rng_[h.id].bernoulli(cfg_.defense.securityware.acceptance)) return;
    install_security_stack(h);
  }
  if (h.repertoire.has_value()) {
    for (const Detector& d : p.carried) {
      h.repertoire->merge(d, p.src, step_, cfg_.defense.detector.effector_lifespan);
    }
  }
}

void World::handle_control(Host& h, const Packet& p) {
  if (p.token != valid_token_) {
    // Spoofed control traffic: recorded for the audit trail, contributes
    // nothing to action decisions.
    if (p.control == ControlKind::AlertReport) {
      ++invalid_trigger_total_;
      signals_.add_trigger(p.alert_suspect, {step_, p.src, false});
    }
    return;
  }
  switch (p.control) {
    case ControlKind::DetectorShare:
      if (h.repertoire.has_value()) {
        for (const Detector& d : p.carried) {
          h.repertoire->merge(d, p.src, step_, cfg_.defense.detector.effector_lifespan);
        }
      }
      break;
    case ControlKind::AntigenCapture:
      if (h.kind == NodeKind::LymphService) {
        for (auto& node : lymph_) {
          if (node.id != h.id) continue;
          uint64_t hash = p.payload.content_hash();
          bool found = false;
          for (auto& a : node.antigens) {
            if (a.sig.content_hash() == hash && a.sig == p.payload) {
              a.last_step = step_;
              a.origin = p.src;
              found = true;
              break;
            }
          }
          if (!found) {
            node.antigens.push_back({p.payload, step_, step_, p.src, node.next_insert++, false});
          }
          break;
        }
      }
      break;
    case ControlKind::AlertReport:
      signals_.add_trigger(p.alert_suspect, {step_, p.src, true});
      break;
    case ControlKind::None:
      break;
  }
}

void World::phase_infection() {
  for (const auto& pending : pending_infections_) {
    Host& h = hosts_[pending.host];
    if (h.state != HostState::Clean) continue;
    double p = h.vulnerability * cfg_.strain.infectivity;
    if (infection_rng_[pending.host].bernoulli(p)) {
      force_infect(pending.host, pending.strain, pending.packet_id, false);
    }
  }
  pending_infections_.clear();
}

void World::phase_lymph() {
  if (!cfg_.defense.lymph.enabled) return;
  const auto& ly = cfg_.defense.lymph;
  for (auto& node : lymph_) {
    Host& h = hosts_[node.id];
    if (!h.repertoire.has_value()) continue;

    // Evict antigens past the retention window.
    node.antigens.erase(std::remove_if(node.antigens.begin(), node.antigens.end(),
                                       [this, &ly](const CapturedAntigen& a) {
                                         return step_ - a.last_step >= ly.retention;
                                       }),
                        node.antigens.end());
    if (node.antigens.empty()) continue;

    // Most recently seen antigens get the maturation budget.
    std::vector<size_t> order(node.antigens.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&node](size_t a, size_t b) {
      const auto& A = node.antigens[a];
      const auto& B = node.antigens[b];
      if (A.last_step != B.last_step) return A.last_step > B.last_step;
      return A.insert_order < B.insert_order;
    });
    size_t budget = std::min<size_t>(ly.budget, order.size());

    MatureParams params{ly.clones, ly.mutation_rate, ly.survivors, ly.rounds};
    for (size_t bi = 0; bi < budget; ++bi) {
      CapturedAntigen& antigen = node.antigens[order[bi]];

      if (ly.fragments > 0 && !antigen.fragments_done) {
        for (auto& frag : fragment_antigen(antigen.sig, ly.fragments, ly.fragment_bits, step_,
                                           cfg_.defense.detector.effector_lifespan)) {
          h.repertoire->absorb(std::move(frag), step_);
        }
        antigen.fragments_done = true;
      }

      auto seeds = h.repertoire->maturation_seeds(antigen.sig, ly.seeds);
      if (seeds.empty()) continue;
      MatureResult result = mature(seeds, antigen.sig, params, maturation_rng_[node.id], step_,
                                   cfg_.defense.detector.effector_lifespan);
      for (const auto& d : result.detectors) {
        h.repertoire->absorb(d, step_);
      }

      // Ship the refined detectors back to whoever captured the antigen.
      if (antigen.origin != node.id && antigen.origin < hosts_.size()) {
        Packet p = make_packet(node.id, antigen.origin, PacketClass::Control, BitSignature(1));
        p.port = Port::Service;
        p.token = valid_token_;
        p.control = ControlKind::DetectorShare;
        size_t carry = std::min<size_t>(result.detectors.size(), cfg_.defense.gossip.share_top);
        p.carried.assign(result.detectors.begin(), result.detectors.begin() + carry);
        emit(std::move(p));
      }
    }
    h.repertoire->enforce_capacity(ly.capacity);
  }
}

void World::phase_action() {
  signals_.prune(step_, cfg_.defense.regulation.window);

  // Quarantine releases first: a released host can be re-quarantined by fresh
  // evidence in the same step.
  for (auto& h : hosts_) {
    if (h.state != HostState::Quarantined || h.quarantine_until > step_) continue;
    h.state = HostState::Clean;
    if (h.strain_active) {
      // Disinfection completes an elimination: promote every detector whose
      // match contributed to this quarantine.
      h.strain_active = false;
      for (size_t qi = quarantines_.size(); qi-- > 0;) {
        const QuarantineRecord& q = quarantines_[qi];
        if (q.host != h.id || q.release_at != h.quarantine_until) continue;
        for (const auto& m : q.evidence) {
          if (m.detector_owner < hosts_.size() && hosts_[m.detector_owner].repertoire.has_value()) {
            hosts_[m.detector_owner].repertoire->promote_memory(m.detector_local);
          }
        }
        break;
      }
    }
  }

  for (const auto& [suspect, entry] : signals_.suspects()) {
    if (suspect >= hosts_.size()) continue;
    Host& h = hosts_[suspect];
    if (h.state == HostState::Quarantined) continue;
    bool damage = damage_flag(suspect);
    if (regulate_action(entry, damage, cfg_.defense.regulation.mode) != ActionDecision::Quarantine) {
      continue;
    }
    QuarantineRecord rec;
    rec.step = step_;
    rec.host = suspect;
    rec.release_at = step_ + cfg_.defense.regulation.quarantine_duration;
    rec.was_infected = h.state == HostState::Infected;
    rec.strain = h.strain_active ? h.strain : 0;
    rec.distinct_matches = entry.distinct_match_templates();
    rec.damage_flag = damage;
    rec.invalid_triggers = entry.invalid_trigger_count();
    rec.evidence = entry.matches;
    quarantines_.push_back(std::move(rec));
    h.state = HostState::Quarantined;
    h.quarantine_until = step_ + cfg_.defense.regulation.quarantine_duration;
  }

  for (auto& h : hosts_) {
    if (!h.repertoire.has_value()) continue;
    h.repertoire->decay(step_);
    h.repertoire->enforce_capacity(cfg_.defense.lymph.capacity);
  }
}

void World::phase_record() {
  MetricsRecord r = totals_;
  r.step = step_;
  r.reports_filed = blacklist_.reports_filed();

  std::set<uint32_t> strains_alive;
  for (const auto& h : hosts_) {
    bool carrying = h.state == HostState::Infected ||
                    (h.state == HostState::Quarantined && h.strain_active);
    if (carrying) {
      ++r.infected_count;
      strains_alive.insert(h.strain);
    }
    if (h.state == HostState::Quarantined) ++r.quarantined_count;
    if (h.kind == NodeKind::Endpoint && h.adopts.scanner) ++r.adopter_count;
    if (h.repertoire.has_value()) {
      RepertoireCensus c = h.repertoire->census();
      r.detectors_naive += c.naive;
      r.detectors_effector += c.effector;
      r.detectors_memory += c.memory;
    }
  }
  for (const auto& p : in_flight_) {
    if (true_class(p) == PacketClass::Malware) {
      ++r.malware_in_flight;
      strains_alive.insert(p.strain);
    }
  }
  r.distinct_strains_alive = static_cast<uint32_t>(strains_alive.size());
  series_.push_back(r);

  current_ledger_.inflight_after = in_flight_.size();
  ledgers_.push_back(current_ledger_);
}

void World::step() {
  current_ledger_ = StepLedger{};
  current_ledger_.inflight_before = in_flight_.size();

  phase_reinjection();
  phase_legit();       // 1
  phase_malicious();   // 2
  phase_security();    // 3
  phase_routing();     // 4
  phase_delivery();    // 5
  phase_infection();   // 6
  phase_lymph();       // 7
  phase_action();      // 8
  phase_record();      // 9

  ++step_;
}

uint64_t World::state_hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  fold(h, step_);
  fold(h, valid_token_);
  fold(h, strains_.count());
  for (uint32_t s = 0; s < strains_.count(); ++s) fold(h, strains_.genome(s).content_hash());

  for (const auto& host : hosts_) {
    fold(h, host.id);
    fold(h, static_cast<uint64_t>(host.state));
    fold(h, host.strain);
    fold(h, host.strain_active ? 1 : 0);
    fold(h, host.quarantine_until);
    fold(h, (host.adopts.barrier ? 1 : 0) | (host.adopts.blacklist ? 2 : 0) |
                (host.adopts.scanner ? 4 : 0) | (host.adopts.securityware ? 8 : 0));
    fold(h, host.damage_level());
    if (host.repertoire.has_value()) {
      fold(h, host.repertoire->size());
      for (const auto& d : host.repertoire->items()) {
        fold(h, d.tmpl.content_hash());
        fold(h, d.r);
        fold(h, static_cast<uint64_t>(d.state));
        fold(h, d.expires_at);
        fold(h, d.window_offset);
        fold(h, d.affinity_best);
        fold(h, d.local_id);
      }
    }
  }

  for (const auto& p : in_flight_) {
    fold(h, p.id);
    fold(h, p.src);
    fold(h, p.dst);
    fold(h, p.at);
    fold(h, p.hops_remaining);
    fold(h, static_cast<uint64_t>(true_class(p)));
    fold(h, static_cast<uint64_t>(p.control));
    fold(h, p.payload.content_hash());
    fold(h, p.token);
    fold(h, p.carried.size());
  }

  fold(h, blacklist_.reports_filed());
  fold(h, blacklist_.blocked_count());
  for (const auto& node : lymph_) {
    fold(h, node.antigens.size());
    for (const auto& a : node.antigens) {
      fold(h, a.sig.content_hash());
      fold(h, a.last_step);
    }
  }

  auto fold_streams = [&h](const std::vector<RngStream>& streams) {
    for (const auto& s : streams) fold(h, s.state_hash());
  };
  fold_streams(legit_rng_);
  fold_streams(emission_rng_);
  fold_streams(mutation_rng_);
  fold_streams(infection_rng_);
  fold_streams(gossip_rng_);
  fold_streams(securityware_rng_);
  fold_streams(maturation_rng_);
  return h;
}

RunOutput run_scenario(const ScenarioConfig& cfg, uint64_t seed) {
  cfg.validate();
  RunOutput out;
  World world(cfg, seed);

  uint32_t quiet_streak = 0;
  for (uint32_t t = 0; t < cfg.run.horizon; ++t) {
    world.step();
    bool quiet = world.series().back().quiet();
    quiet_streak = quiet ? quiet_streak + 1 : 0;

    if (cfg.strain.reinject_delay > 0 && !world.reinjection_done()) {
      if (quiet && !world.reinjection_scheduled()) {
        world.schedule_reinjection(t + cfg.strain.reinject_delay);
      } else if (!quiet && world.reinjection_scheduled()) {
        world.cancel_reinjection();
      }
    }

    bool reinjection_outstanding =
        cfg.strain.reinject_delay > 0 && !world.reinjection_done();
    if (quiet_streak >= cfg.run.cooldown && !reinjection_outstanding) break;
  }

  out.series = world.series();
  out.summary = summarize(out.series, cfg.run.cooldown);
  out.infections = world.infections();
  out.quarantines = world.quarantines();
  out.final_state_hash = world.state_hash();
  out.invalid_triggers = world.invalid_trigger_total();
  return out;
}

std::vector<RunOutput> run_replicates(const ScenarioConfig& cfg, uint64_t base_seed,
                                      uint32_t replicates, bool parallel) {
  std::vector<RunOutput> out(replicates);
  if (!parallel || replicates <= 1) {
    for (uint32_t k = 0; k < replicates; ++k) out[k] = run_scenario(cfg, base_seed + k);
    return out;
  }
  std::vector<std::future<RunOutput>> futures;
  futures.reserve(replicates);
  for (uint32_t k = 0; k < replicates; ++k) {
    futures.push_back(std::async(std::launch::async,
                                 [&cfg, base_seed, k] { return run_scenario(cfg, base_seed + k); }));
  }
  for (uint32_t k = 0; k < replicates; ++k) out[k] = futures[k].get();
  return out;
}

}  // namespace immunet
