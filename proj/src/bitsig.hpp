#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace immunet {

// Fixed-length bit vector shared by payloads, malware genomes and detector
// templates. Bit index 0 is the least significant bit of the numeric value;
// the hex form is that value written most-significant digit first.
class BitSignature {
 public:
  BitSignature() = default;
  explicit BitSignature(uint32_t length);

  static BitSignature from_hex(std::string_view hex);   // length = 4 * digits
  static BitSignature from_bits(std::string_view bits); // "1011": index 0 first

  uint32_t length() const { return length_; }
  bool empty() const { return length_ == 0; }

  bool bit(uint32_t i) const;
  void set_bit(uint32_t i, bool v);
  void flip_bit(uint32_t i);

  std::string to_hex() const;
  std::string to_bits() const;

  // Copy of bits [offset, offset+width).
  BitSignature window(uint32_t offset, uint32_t width) const;
  // Overwrite bits [offset, offset+sub.length()) with sub.
  void set_window(uint32_t offset, const BitSignature& sub);

  uint64_t content_hash() const;

  // Numeric-value order. Lengths must match.
  int compare(const BitSignature& other) const;
  bool operator==(const BitSignature& other) const;
  bool operator!=(const BitSignature& other) const { return !(*this == other); }
  bool operator<(const BitSignature& other) const { return compare(other) < 0; }

  const std::vector<uint64_t>& words() const { return words_; }

 private:
  uint32_t length_ = 0;
  std::vector<uint64_t> words_;
};

// Longest contiguous run of positionwise agreement between a and b, in bits.
// Range [0, L]. Throws std::invalid_argument on length mismatch.
int affinity(const BitSignature& a, const BitSignature& b);

// Independent reference implementation: position-by-position scan. Kept
// deliberately naive; used by the CLI `oracle` subcommand and cross-checked
// against affinity() in the test suites.
int naive_affinity(const BitSignature& a, const BitSignature& b);

int hamming_distance(const BitSignature& a, const BitSignature& b);

BitSignature complement(const BitSignature& a);

}  // namespace immunet
