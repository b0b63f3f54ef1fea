#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "elastic/bitstring.hpp"
#include "elastic/cipher_core.hpp"
#include "elastic/error.hpp"
#include "elastic/params.hpp"

namespace elastic {

class MasterKey {
 public:
  explicit MasterKey(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {
    if (bytes_.empty() || bytes_.size() > 256) {
      throw Error(ErrorKind::InvalidArgument, "master key must be 1..256 octets");
    }
  }

  static MasterKey from_hex(std::string_view hex) {
    if (hex.empty() || hex.size() % 2 != 0) {
      throw Error(ErrorKind::InvalidArgument, "master key hex must have an even, non-zero length");
    }
    return MasterKey(BitString::from_hex(hex).to_bytes());
  }

  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  std::string to_hex() const { return BitString::from_bytes(bytes_).to_hex(); }

 private:
  std::vector<std::uint8_t> bytes_;
};

// Plain RC4: key scheduling then output, nothing dropped.
class Rc4 {
 public:
  explicit Rc4(std::span<const std::uint8_t> key) {
    if (key.empty()) {
      throw Error(ErrorKind::InvalidArgument, "RC4 key must not be empty");
    }
    for (std::size_t k = 0; k < 256; ++k) {
      s_[k] = static_cast<std::uint8_t>(k);
    }
    std::uint8_t j = 0;
    for (std::size_t k = 0; k < 256; ++k) {
      j = static_cast<std::uint8_t>(j + s_[k] + key[k % key.size()]);
      std::swap(s_[k], s_[j]);
    }
  }

  std::uint8_t next() noexcept {
    i_ = static_cast<std::uint8_t>(i_ + 1);
    j_ = static_cast<std::uint8_t>(j_ + s_[i_]);
    std::swap(s_[i_], s_[j_]);
    return s_[static_cast<std::uint8_t>(s_[i_] + s_[j_])];
  }

 private:
  std::array<std::uint8_t, 256> s_{};
  std::uint8_t i_ = 0;
  std::uint8_t j_ = 0;
};

// First `nbits` bits of the RC4 keystream, MSB of each output byte first.
inline BitString expand(const MasterKey& key, std::size_t nbits) {
  Rc4 rc4(key.bytes());
  std::vector<std::uint8_t> bytes((nbits + 7) / 8);
  for (auto& b : bytes) {
    b = rc4.next();
  }
  return BitString::from_bytes(bytes, nbits);
}

enum class KeyUse {
  InitialWhitening,
  InitialPermutation,
  RoundKey,  // one E0 round inside a level-0 cycle
  InnerXor,  // B ^= K inside a level >= 1 cycle
  TailXor,   // y bits added to the tail after each E_n cycle
  FinalPermutation,
  FinalWhitening,
};

inline const char* to_string(KeyUse use) noexcept {
  switch (use) {
    case KeyUse::InitialWhitening: return "whiten-in";
    case KeyUse::InitialPermutation: return "perm-in";
    case KeyUse::RoundKey: return "round-key";
    case KeyUse::InnerXor: return "inner-xor";
    case KeyUse::TailXor: return "tail-xor";
    case KeyUse::FinalPermutation: return "perm-out";
    case KeyUse::FinalWhitening: return "whiten-out";
  }
  return "?";
}

inline constexpr std::size_t kNoRound = static_cast<std::size_t>(-1);

struct LayoutRecord {
  KeyUse use = KeyUse::RoundKey;
  std::size_t round = kNoRound;  // E_n round, kNoRound for whitening/permutation
  unsigned level = 0;            // cycle level that consumes the bits
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string path;  // position inside the cycle recursion, e.g. "r2.1.0"

  friend bool operator==(const LayoutRecord&, const LayoutRecord&) = default;
};

using KeyLayout = std::vector<LayoutRecord>;

namespace detail {

class LayoutBuilder {
 public:
  void add(KeyUse use, std::size_t round, unsigned level, std::size_t length, std::string path) {
    if (length == 0) {
      return;
    }
    layout_.push_back({use, round, level, offset_, length, std::move(path)});
    offset_ += length;
  }

  // Mirrors the consumption order of one level-m cycle call.
  void cycle(const CipherSpec& spec, unsigned m, std::size_t round, const std::string& path) {
    if (m == 0) {
      for (std::size_t t = 0; t < spec.rounds_per_cycle; ++t) {
        add(KeyUse::RoundKey, round, 0, spec.round_key_bits, path + ".k" + std::to_string(t));
      }
      return;
    }
    const std::size_t half = (std::size_t{1} << (m - 1)) * spec.block_bits;
    for (int it = 0; it < 2; ++it) {
      const std::string sub = path + "." + std::to_string(it);
      cycle(spec, m - 1, round, sub);
      add(KeyUse::InnerXor, round, m, half, sub + ".xor");
    }
  }

  KeyLayout take() && { return std::move(layout_); }

 private:
  KeyLayout layout_;
  std::size_t offset_ = 0;
};

}  // namespace detail

// Static unrolling of every key-pointer advance of one encryption.
inline KeyLayout layout_for(const ElasticParams& p, const CipherSpec& spec) {
  detail::LayoutBuilder b;
  b.add(KeyUse::InitialWhitening, kNoRound, p.level, p.block_bits, "whiten-in");
  b.add(KeyUse::InitialPermutation, kNoRound, p.level, p.perm_key_bits, "perm-in");
  for (std::size_t i = 0; i < p.rounds; ++i) {
    const std::string path = "r" + std::to_string(i);
    b.cycle(spec, p.level - 1, i, path);
    b.add(KeyUse::TailXor, i, p.level, p.tail_bits, path + ".tail");
  }
  b.add(KeyUse::FinalPermutation, kNoRound, p.level, p.perm_key_bits, "perm-out");
  b.add(KeyUse::FinalWhitening, kNoRound, p.level, p.block_bits, "whiten-out");
  return std::move(b).take();
}

// Key bits of one E_n round: the cycle region followed by the tail bits.
struct RoundRegion {
  std::size_t cycle_offset = 0;
  std::size_t cycle_bits = 0;
  std::size_t tail_offset = 0;
  std::size_t tail_bits = 0;
};

// Key material plus the map of which bits feed which step.
class ExpandedKey {
 public:
  ExpandedKey(BitString material, KeyLayout layout)
      : material_(std::move(material)), layout_(std::move(layout)) {
    std::size_t expect = 0;
    for (const auto& rec : layout_) {
      if (rec.offset != expect) {
        throw Error(ErrorKind::InvariantViolation, "key layout is not contiguous at " + rec.path);
      }
      expect += rec.length;
    }
    if (expect != material_.size()) {
      throw Error(ErrorKind::KeyMismatch, "key layout covers " + std::to_string(expect) +
                                              " bits, material has " +
                                              std::to_string(material_.size()));
    }
    index_rounds();
  }

  static ExpandedKey derive(const MasterKey& key, const ElasticParams& p, const CipherSpec& spec) {
    return ExpandedKey(expand(key, p.key_bits), layout_for(p, spec));
  }

  // Raw material for test vectors; length must be exactly l(K).
  static ExpandedKey from_raw(BitString material, const ElasticParams& p, const CipherSpec& spec) {
    if (material.size() != p.key_bits) {
      throw Error(ErrorKind::KeyMismatch, "raw expanded key has " +
                                              std::to_string(material.size()) +
                                              " bits, parameters need " +
                                              std::to_string(p.key_bits));
    }
    return ExpandedKey(std::move(material), layout_for(p, spec));
  }

  const BitString& material() const noexcept { return material_; }
  const KeyLayout& layout() const noexcept { return layout_; }
  std::size_t size() const noexcept { return material_.size(); }

  BitString segment(const LayoutRecord& rec) const {
    return material_.slice(rec.offset, rec.offset + rec.length);
  }

  const LayoutRecord& find(KeyUse use) const {
    for (const auto& rec : layout_) {
      if (rec.use == use) {
        return rec;
      }
    }
    throw Error(ErrorKind::KeyMismatch, std::string("layout has no ") + to_string(use) + " record");
  }

  std::size_t rounds() const noexcept { return regions_.size(); }

  const RoundRegion& region(std::size_t round) const {
    if (round >= regions_.size()) {
      throw Error(ErrorKind::KeyMismatch, "layout has no round " + std::to_string(round));
    }
    return regions_[round];
  }

  std::string dump() const {
    std::ostringstream os;
    os << "bits " << material_.size() << '\n' << "hex  " << material_.to_hex() << '\n';
    os << std::left << std::setw(8) << "offset" << std::setw(8) << "length" << std::setw(12)
       << "use" << "path\n";
    for (const auto& rec : layout_) {
      os << std::setw(8) << rec.offset << std::setw(8) << rec.length << std::setw(12)
         << to_string(rec.use) << rec.path << '\n';
    }
    return os.str();
  }

 private:
  void index_rounds() {
    for (const auto& rec : layout_) {
      if (rec.round == kNoRound) {
        continue;
      }
      if (rec.round == regions_.size()) {
        regions_.push_back({rec.offset, 0, rec.offset, 0});
      }
      auto& reg = regions_.back();
      if (rec.use == KeyUse::TailXor) {
        reg.tail_offset = rec.offset;
        reg.tail_bits = rec.length;
      } else {
        reg.cycle_bits += rec.length;
        reg.tail_offset = rec.offset + rec.length;
      }
    }
  }

  BitString material_;
  KeyLayout layout_;
  std::vector<RoundRegion> regions_;
};

}  // namespace elastic
