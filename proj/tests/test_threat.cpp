#include <set>

#include "bitsig.hpp"
#include "doctest.h"
#include "rng.hpp"
#include "threat.hpp"

using namespace immunet;

namespace {

BitSignature random_sig(uint32_t length, RngStream& rng) {
  BitSignature s(length);
  for (uint32_t i = 0; i < length; ++i) s.set_bit(i, rng.bernoulli(0.5));
  return s;
}

}  // namespace

TEST_CASE("root interning and genome bijection") {
  StrainRegistry reg;
  BitSignature g = BitSignature::from_hex("deadbeefdeadbeef");
  uint32_t root = reg.intern_root(g);
  CHECK(reg.count() == 1);
  CHECK(reg.genome(root) == g);
  CHECK(reg.info(root).parent == StrainInfo::kNoParent);
  CHECK(reg.rooted(root));
}

TEST_CASE("zero mutation rate replicates in place") {
  StrainRegistry reg;
  RngStream rng(50, StreamPurpose::Mutation, 0);
  uint32_t root = reg.intern_root(BitSignature::from_hex("0123456789abcdef"));
  for (int i = 0; i < 100; ++i) {
    CHECK(reg.replicate(root, 0.0, rng) == root);
  }
  CHECK(reg.count() == 1);
}

TEST_CASE("certain mutation of every bit produces the complement strain") {
  StrainRegistry reg;
  RngStream rng(51, StreamPurpose::Mutation, 0);
  BitSignature g = BitSignature::from_hex("f0f0f0f0");
  uint32_t root = reg.intern_root(g);
  uint32_t child = reg.replicate(root, 1.0, rng);
  CHECK(child != root);
  CHECK(reg.genome(child) == complement(g));
  CHECK(reg.info(child).parent == root);
  CHECK(reg.rooted(child));

  // Flipping everything again lands exactly back on the root genome, and the
  // genome-content bijection reuses the root id rather than minting a twin.
  uint32_t back = reg.replicate(child, 1.0, rng);
  CHECK(back == root);
  CHECK(reg.count() == 2);
}

TEST_CASE("mutated lineages stay rooted and ids stay content-unique") {
  StrainRegistry reg;
  RngStream rng(52, StreamPurpose::Mutation, 1);
  RngStream sig_rng(52, StreamPurpose::Scheduling, 1);
  uint32_t root = reg.intern_root(random_sig(64, sig_rng));
  std::vector<uint32_t> frontier = {root};
  for (int i = 0; i < 300; ++i) {
    uint32_t parent = frontier[rng.below(frontier.size())];
    uint32_t child = reg.replicate(parent, 0.05, rng);
    CHECK(reg.rooted(child));
    frontier.push_back(child);
  }
  // Distinct ids have distinct genomes.
  std::set<std::string> genomes;
  for (uint32_t id = 0; id < reg.count(); ++id) {
    CHECK(genomes.insert(reg.genome(id).to_hex()).second);
  }
  // Parent links always point at an earlier id.
  for (uint32_t id = 1; id < reg.count(); ++id) {
    CHECK(reg.info(id).parent < id);
  }
}

TEST_CASE("spam payload is an involution that preserves detectability structure") {
  RngStream rng(53, StreamPurpose::Tokens, 1);
  BitSignature genome = random_sig(64, rng);
  BitSignature mask = random_sig(64, rng);
  BitSignature spam = spam_payload(genome, mask);
  CHECK(spam.length() == 64);
  CHECK(spam_payload(spam, mask) == genome);  // XOR twice is identity
  // Masking with zero changes nothing.
  CHECK(spam_payload(genome, BitSignature(64)) == genome);
  // Each set mask bit flips exactly that payload bit.
  BitSignature one_bit(64);
  one_bit.set_bit(17, true);
  BitSignature flipped = spam_payload(genome, one_bit);
  CHECK(hamming_distance(flipped, genome) == 1);
  CHECK(flipped.bit(17) != genome.bit(17));
}
