#include "bitsig.hpp"

#include <algorithm>
#include <stdexcept>

namespace immunet {

namespace {

constexpr uint32_t kWordBits = 64;

uint32_t word_count(uint32_t length) { return (length + kWordBits - 1) / kWordBits; }

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BitSignature::BitSignature(uint32_t length)
    : length_(length), words_(word_count(length), 0) {}

BitSignature BitSignature::from_hex(std::string_view hex) {
  if (hex.empty()) throw std::invalid_argument("empty hex signature");
  BitSignature out(static_cast<uint32_t>(hex.size()) * 4);
  // hex[0] is the most significant digit.
  for (size_t i = 0; i < hex.size(); ++i) {
    int d = hex_digit(hex[hex.size() - 1 - i]);
    if (d < 0) throw std::invalid_argument("invalid hex digit in signature");
    out.words_[i / 16] |= static_cast<uint64_t>(d) << (4 * (i % 16));
  }
  return out;
}

BitSignature BitSignature::from_bits(std::string_view bits) {
  BitSignature out(static_cast<uint32_t>(bits.size()));
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      out.set_bit(static_cast<uint32_t>(i), true);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("invalid bit character in signature");
    }
  }
  return out;
}

bool BitSignature::bit(uint32_t i) const {
  return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
}

void BitSignature::set_bit(uint32_t i, bool v) {
  uint64_t mask = uint64_t{1} << (i % kWordBits);
  if (v) {
    words_[i / kWordBits] |= mask;
  } else {
    words_[i / kWordBits] &= ~mask;
  }
}

void BitSignature::flip_bit(uint32_t i) {
  words_[i / kWordBits] ^= uint64_t{1} << (i % kWordBits);
}

std::string BitSignature::to_hex() const {
  uint32_t digits = (length_ + 3) / 4;
  std::string out(digits, '0');
  static const char* kDigits = "0123456789abcdef";
  for (uint32_t i = 0; i < digits; ++i) {
    uint64_t nibble = (words_[i / 16] >> (4 * (i % 16))) & 0xf;
    out[digits - 1 - i] = kDigits[nibble];
  }
  return out;
}

std::string BitSignature::to_bits() const {
  std::string out(length_, '0');
  for (uint32_t i = 0; i < length_; ++i) {
    if (bit(i)) out[i] = '1';
  }
  return out;
}

BitSignature BitSignature::window(uint32_t offset, uint32_t width) const {
  if (offset + width > length_) throw std::out_of_range("signature window out of range");
  BitSignature out(width);
  for (uint32_t i = 0; i < width; ++i) out.set_bit(i, bit(offset + i));
  return out;
}

void BitSignature::set_window(uint32_t offset, const BitSignature& sub) {
  if (offset + sub.length() > length_) throw std::out_of_range("signature window out of range");
  for (uint32_t i = 0; i < sub.length(); ++i) set_bit(offset + i, sub.bit(i));
}

uint64_t BitSignature::content_hash() const {
  // FNV-1a over the packed words plus the length.
  uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ull;
    }
  };
  mix(length_);
  for (uint64_t w : words_) mix(w);
  return h;
}

int BitSignature::compare(const BitSignature& other) const {
  if (length_ != other.length_) throw std::invalid_argument("signature length mismatch");
  for (size_t i = words_.size(); i-- > 0;) {
    if (words_[i] != other.words_[i]) return words_[i] < other.words_[i] ? -1 : 1;
  }
  return 0;
}

bool BitSignature::operator==(const BitSignature& other) const {
  return length_ == other.length_ && words_ == other.words_;
}

int affinity(const BitSignature& a, const BitSignature& b) {
  if (a.length() != b.length()) throw std::invalid_argument("signature length mismatch");
  uint32_t length = a.length();
  if (length == 0) return 0;

  int longest = 0;
  int carry = 0;  // run continuing from the top of the previous word
  size_t words = a.words().size();
  for (size_t w = 0; w < words; ++w) {
    uint64_t agree = ~(a.words()[w] ^ b.words()[w]);
    // Zero out positions past the end so phantom bits cannot extend a run.
    uint32_t used = std::min<uint32_t>(64, length - static_cast<uint32_t>(w) * 64);
    if (used < 64) agree &= (uint64_t{1} << used) - 1;

    if (agree == ~uint64_t{0}) {
      carry += 64;
      longest = std::max(longest, carry);
      continue;
    }
    // Run crossing in from the previous word continues through this word's
    // low bits.
    int low = agree == 0 ? 0 : __builtin_ctzll(~agree);
    longest = std::max(longest, carry + low);
    // Longest run fully inside this word, by iterated shift-and.
    uint64_t x = agree;
    int inside = 0;
    while (x != 0) {
      x &= x >> 1;
      ++inside;
    }
    longest = std::max(longest, inside);
    // Run leaving through this word's high bits becomes the next carry.
    uint32_t top = used;  // first unused position
    int high = 0;
    while (high < static_cast<int>(top) && ((agree >> (top - 1 - high)) & 1)) ++high;
    carry = high;
    longest = std::max(longest, carry);
  }
  return longest;
}

int naive_affinity(const BitSignature& a, const BitSignature& b) {
  if (a.length() != b.length()) throw std::invalid_argument("signature length mismatch");
  int best = 0;
  int run = 0;
  for (uint32_t i = 0; i < a.length(); ++i) {
    if (a.bit(i) == b.bit(i)) {
      ++run;
      if (run > best) best = run;
    } else {
      run = 0;
    }
  }
  return best;
}

int hamming_distance(const BitSignature& a, const BitSignature& b) {
  if (a.length() != b.length()) throw std::invalid_argument("signature length mismatch");
  int total = 0;
  for (size_t w = 0; w < a.words().size(); ++w) {
    total += __builtin_popcountll(a.words()[w] ^ b.words()[w]);
  }
  return total;
}

BitSignature complement(const BitSignature& a) {
  BitSignature out(a.length());
  for (uint32_t i = 0; i < a.length(); ++i) out.set_bit(i, !a.bit(i));
  return out;
}

}  // namespace immunet
