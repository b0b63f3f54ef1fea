#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elastic/error.hpp"

namespace elastic {

// Ordered sequence of bits. Index 0 is the leftmost bit, which is the most
// significant bit of any hex or byte rendering. Lengths need not be octet
// aligned; serialized forms pad on the right with zeros.
class BitString {
 public:
  BitString() = default;

  explicit BitString(std::size_t size) : bits_(size, 0) {}

  // "0110" style literal; any other character is rejected.
  static BitString from_bits(std::string_view text) {
    BitString out(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] != '0' && text[i] != '1') {
        throw Error(ErrorKind::InvalidArgument,
                    "bit literal contains '" + std::string(1, text[i]) + "'");
      }
      out.bits_[i] = static_cast<std::uint8_t>(text[i] - '0');
    }
    return out;
  }

  // Takes the leading `nbits` bits of the hex string; trailing pad bits must
  // be zero.
  static BitString from_hex(std::string_view hex, std::size_t nbits) {
    if (nbits > hex.size() * 4) {
      throw Error(ErrorKind::InvalidArgument, "hex string shorter than bit length");
    }
    if ((nbits + 3) / 4 != hex.size()) {
      throw Error(ErrorKind::InvalidArgument, "hex string longer than bit length");
    }
    BitString out(nbits);
    for (std::size_t d = 0; d < hex.size(); ++d) {
      const int v = hex_digit(hex[d]);
      for (std::size_t b = 0; b < 4; ++b) {
        const std::size_t pos = d * 4 + b;
        const auto bit = static_cast<std::uint8_t>((v >> (3 - b)) & 1);
        if (pos < nbits) {
          out.bits_[pos] = bit;
        } else if (bit != 0) {
          throw Error(ErrorKind::InvalidArgument, "non-zero padding bits in hex string");
        }
      }
    }
    return out;
  }

  static BitString from_hex(std::string_view hex) { return from_hex(hex, hex.size() * 4); }

  static BitString from_uint(std::uint64_t value, std::size_t width) {
    if (width > 64) {
      throw Error(ErrorKind::InvalidArgument, "from_uint width exceeds 64 bits");
    }
    BitString out(width);
    for (std::size_t i = 0; i < width; ++i) {
      out.bits_[i] = static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1U);
    }
    return out;
  }

  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits) {
    if (nbits > bytes.size() * 8) {
      throw Error(ErrorKind::InvalidArgument, "byte buffer shorter than bit length");
    }
    BitString out(nbits);
    for (std::size_t i = 0; i < nbits; ++i) {
      out.bits_[i] = static_cast<std::uint8_t>((bytes[i / 8] >> (7 - i % 8)) & 1U);
    }
    return out;
  }

  static BitString from_bytes(std::span<const std::uint8_t> bytes) {
    return from_bytes(bytes, bytes.size() * 8);
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }

  bool at(std::size_t i) const {
    if (i >= bits_.size()) {
      throw Error(ErrorKind::InvariantViolation, "bit index out of range");
    }
    return bits_[i] != 0;
  }

  void set(std::size_t i, bool value) {
    if (i >= bits_.size()) {
      throw Error(ErrorKind::InvariantViolation, "bit index out of range");
    }
    bits_[i] = value ? 1 : 0;
  }

  void flip(std::size_t i) {
    if (i >= bits_.size()) {
      throw Error(ErrorKind::InvariantViolation, "bit index out of range");
    }
    bits_[i] ^= 1U;
  }

  // Half-open [begin, end).
  BitString slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > bits_.size()) {
      throw Error(ErrorKind::InvariantViolation, "slice out of range");
    }
    BitString out;
    out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(begin),
                     bits_.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
  }

  // Overwrites bits [offset, offset + part.size()) with `part`.
  void replace(std::size_t offset, const BitString& part) {
    if (offset > bits_.size() || part.size() > bits_.size() - offset) {
      throw Error(ErrorKind::InvariantViolation, "replace out of range");
    }
    std::copy(part.bits_.begin(), part.bits_.end(),
              bits_.begin() + static_cast<std::ptrdiff_t>(offset));
  }

  // XORs `part` into bits [offset, offset + part.size()).
  void xor_at(std::size_t offset, const BitString& part) {
    if (offset > bits_.size() || part.size() > bits_.size() - offset) {
      throw Error(ErrorKind::InvariantViolation, "xor_at out of range");
    }
    for (std::size_t i = 0; i < part.size(); ++i) {
      bits_[offset + i] ^= part.bits_[i];
    }
  }

  BitString concat(const BitString& tail) const {
    BitString out = *this;
    out.bits_.insert(out.bits_.end(), tail.bits_.begin(), tail.bits_.end());
    return out;
  }

  std::uint64_t to_uint() const {
    if (bits_.size() > 64) {
      throw Error(ErrorKind::InvariantViolation, "to_uint on more than 64 bits");
    }
    std::uint64_t v = 0;
    for (auto b : bits_) {
      v = (v << 1) | b;
    }
    return v;
  }

  std::size_t popcount() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
  }

  std::string to_bits() const {
    std::string out(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      out[i] = bits_[i] ? '1' : '0';
    }
    return out;
  }

  // Lower-case hex, right-padded with zero bits to a whole digit.
  std::string to_hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out((bits_.size() + 3) / 4, '0');
    for (std::size_t d = 0; d < out.size(); ++d) {
      int v = 0;
      for (std::size_t b = 0; b < 4; ++b) {
        const std::size_t pos = d * 4 + b;
        v = (v << 1) | (pos < bits_.size() ? bits_[pos] : 0);
      }
      out[d] = kDigits[v];
    }
    return out;
  }

  // Right-padded with zero bits to whole octets.
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      out[i / 8] = static_cast<std::uint8_t>(out[i / 8] | (bits_[i] << (7 - i % 8)));
    }
    return out;
  }

  friend bool operator==(const BitString&, const BitString&) = default;
  // Length first, then lexicographic on bits.
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (auto c = a.size() <=> b.size(); c != 0) {
      return c;
    }
    return a.bits_ <=> b.bits_;
  }

 private:
  static int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw Error(ErrorKind::InvalidArgument, "invalid hex digit '" + std::string(1, c) + "'");
  }

  std::vector<std::uint8_t> bits_;
};

inline BitString xor_bits(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::InvariantViolation,
                "xor of " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                    " bits");
  }
  BitString out = a;
  out.xor_at(0, b);
  return out;
}

inline BitString operator^(const BitString& a, const BitString& b) { return xor_bits(a, b); }

// Bits at positions (start + t) mod modulus, t = 0..count-1.
inline BitString slice_wrapping(const BitString& s, std::size_t start, std::size_t count,
                                std::size_t modulus) {
  if (modulus > s.size()) {
    throw Error(ErrorKind::InvariantViolation, "wrap modulus exceeds string length");
  }
  if (count > modulus) {
    throw Error(ErrorKind::InvariantViolation, "window larger than wrapped region");
  }
  if (count > 0 && start >= modulus) {
    throw Error(ErrorKind::InvariantViolation, "window start outside wrapped region");
  }
  BitString out(count);
  for (std::size_t t = 0; t < count; ++t) {
    out.set(t, s[(start + t) % modulus]);
  }
  return out;
}

// Inverse of slice_wrapping: writes `window` back at (start + t) mod modulus.
inline BitString write_wrapping(const BitString& s, std::size_t start, const BitString& window,
                                std::size_t modulus) {
  if (modulus > s.size()) {
    throw Error(ErrorKind::InvariantViolation, "wrap modulus exceeds string length");
  }
  if (window.size() > modulus) {
    throw Error(ErrorKind::InvariantViolation, "window larger than wrapped region");
  }
  if (!window.empty() && start >= modulus) {
    throw Error(ErrorKind::InvariantViolation, "window start outside wrapped region");
  }
  BitString out = s;
  for (std::size_t t = 0; t < window.size(); ++t) {
    out.set((start + t) % modulus, window[t]);
  }
  return out;
}

// Left rotation: out[t] = s[(t + amount) mod len]. Negative amounts rotate right.
inline BitString rotate(const BitString& s, std::int64_t amount) {
  const auto len = static_cast<std::int64_t>(s.size());
  if (len == 0) {
    return s;
  }
  const auto shift = static_cast<std::size_t>(((amount % len) + len) % len);
  BitString out(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) {
    out.set(t, s[(t + shift) % s.size()]);
  }
  return out;
}

}  // namespace elastic
