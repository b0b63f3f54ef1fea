#pragma once

#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "elastic/bitstring.hpp"
#include "elastic/error.hpp"

namespace elastic {

// Parameters of the underlying fixed-length cipher E0.
struct CipherSpec {
  std::string name;
  std::size_t block_bits = 0;        // L
  std::size_t rounds_per_cycle = 0;  // x
  std::size_t cycles = 0;            // c0
  std::size_t round_key_bits = 0;    // key bits per E0 round

  std::size_t rounds() const noexcept { return cycles * rounds_per_cycle; }
  std::size_t cycle_key_bits() const noexcept { return rounds_per_cycle * round_key_bits; }

  void validate() const {
    if (block_bits == 0 || rounds_per_cycle == 0 || cycles == 0 || round_key_bits == 0) {
      throw Error(ErrorKind::InvariantViolation, "cipher spec fields must be >= 1");
    }
  }

  std::string table() const {
    std::ostringstream os;
    os << "cipher            " << name << '\n'
       << "block bits (L)    " << block_bits << '\n'
       << "rounds/cycle (x)  " << rounds_per_cycle << '\n'
       << "cycles (c0)       " << cycles << '\n'
       << "rounds (r0)       " << rounds() << '\n'
       << "round key bits    " << round_key_bits << '\n';
    return os.str();
  }
};

// A keyed, invertible E0 round. Implementations whose last step is the round
// key XOR can be wrapped by the elastic engine.
template <typename R>
concept RoundFunction = requires(const R& r, const BitString& state, const BitString& key) {
  { r.spec() } -> std::convertible_to<CipherSpec>;
  { r.forward(state, key) } -> std::same_as<BitString>;
  { r.inverse(state, key) } -> std::same_as<BitString>;
};

namespace detail {

// PRESENT S-box.
inline constexpr std::array<std::uint8_t, 16> kSbox = {0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD,
                                                       0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2};

constexpr std::array<std::uint8_t, 16> invert_sbox() {
  std::array<std::uint8_t, 16> inv{};
  for (std::uint8_t v = 0; v < 16; ++v) {
    inv[kSbox[v]] = v;
  }
  return inv;
}

inline constexpr std::array<std::uint8_t, 16> kSboxInv = invert_sbox();

inline void check_width(const BitString& s, std::size_t width, const char* what) {
  if (s.size() != width) {
    throw Error(ErrorKind::InvariantViolation, std::string(what) + " has " +
                                                   std::to_string(s.size()) + " bits, expected " +
                                                   std::to_string(width));
  }
}

}  // namespace detail

// Toy substitution-permutation round on `Width` bits: S-box on every nibble,
// bit i moved to position (Multiplier * i) mod Width, then round-key XOR.
template <std::size_t Width, std::size_t Multiplier>
class SpnRound {
  static_assert(Width % 4 == 0 && Width <= 32);
  static_assert(std::gcd(Multiplier, Width) == 1, "bit permutation must be a bijection");

 public:
  using word = std::uint32_t;

  SpnRound(std::string name, std::size_t cycles) : spec_{std::move(name), Width, 1, cycles, Width} {
    spec_.validate();
  }

  const CipherSpec& spec() const noexcept { return spec_; }

  static constexpr word mask() noexcept {
    return Width == 32 ? ~word{0} : static_cast<word>((word{1} << Width) - 1);
  }

  // Word form: bit 0 of the BitString is the most significant bit.
  static constexpr word forward_word(word state, word key) noexcept {
    word sub = 0;
    for (std::size_t nib = 0; nib < Width / 4; ++nib) {
      const std::size_t shift = Width - 4 * (nib + 1);
      sub |= static_cast<word>(detail::kSbox[(state >> shift) & 0xF]) << shift;
    }
    word out = 0;
    for (std::size_t i = 0; i < Width; ++i) {
      const word bit = (sub >> (Width - 1 - i)) & 1U;
      out |= bit << (Width - 1 - (Multiplier * i) % Width);
    }
    return (out ^ key) & mask();
  }

  static constexpr word inverse_word(word state, word key) noexcept {
    const word permuted = (state ^ key) & mask();
    word sub = 0;
    for (std::size_t i = 0; i < Width; ++i) {
      const word bit = (permuted >> (Width - 1 - (Multiplier * i) % Width)) & 1U;
      sub |= bit << (Width - 1 - i);
    }
    word out = 0;
    for (std::size_t nib = 0; nib < Width / 4; ++nib) {
      const std::size_t shift = Width - 4 * (nib + 1);
      out |= static_cast<word>(detail::kSboxInv[(sub >> shift) & 0xF]) << shift;
    }
    return out;
  }

  BitString forward(const BitString& state, const BitString& key) const {
    detail::check_width(state, Width, "round state");
    detail::check_width(key, Width, "round key");
    return BitString::from_uint(
        forward_word(static_cast<word>(state.to_uint()), static_cast<word>(key.to_uint())), Width);
  }

  BitString inverse(const BitString& state, const BitString& key) const {
    detail::check_width(state, Width, "round state");
    detail::check_width(key, Width, "round key");
    return BitString::from_uint(
        inverse_word(static_cast<word>(state.to_uint()), static_cast<word>(key.to_uint())), Width);
  }

 private:
  CipherSpec spec_;
};

class Sp16 : public SpnRound<16, 5> {
 public:
  explicit Sp16(std::size_t cycles = 4) : SpnRound("sp16", cycles) {}
};

class Sp8 : public SpnRound<8, 3> {
 public:
  explicit Sp8(std::size_t cycles = 2) : SpnRound("sp8", cycles) {}
};

// Key addition only. Each output bit depends on exactly one input bit, so it
// never forms a cycle and never diffuses.
class IdentityRound {
 public:
  explicit IdentityRound(std::size_t width, std::size_t cycles = 1)
      : spec_{"identity", width, 1, cycles, width} {
    spec_.validate();
  }

  const CipherSpec& spec() const noexcept { return spec_; }

  BitString forward(const BitString& state, const BitString& key) const {
    detail::check_width(state, spec_.block_bits, "round state");
    return state ^ key;
  }

  BitString inverse(const BitString& state, const BitString& key) const {
    return forward(state, key);
  }

 private:
  CipherSpec spec_;
};

struct CycleDetection {
  std::size_t rounds = 0;
  bool converged = false;
};

// Least number of consecutive rounds after which every output bit depends on
// at least two input bits, required to hold for each of `key_samples` random
// round-key sequences. Inputs are enumerated exhaustively when L <= 16,
// otherwise 2^12 random contexts per input bit are used.
template <RoundFunction R>
CycleDetection detect_cycle_length(const R& round, std::size_t key_samples,
                                   std::uint64_t seed = 0x5eedULL) {
  if (key_samples == 0) {
    throw Error(ErrorKind::InvalidArgument, "detect_cycle_length needs at least one key sample");
  }
  const CipherSpec spec = round.spec();
  const std::size_t width = spec.block_bits;
  const bool exhaustive = width <= 16;
  const std::size_t contexts = exhaustive ? (std::size_t{1} << width) : (std::size_t{1} << 12);
  std::mt19937_64 rng(seed);

  auto random_bits = [&rng](std::size_t n) {
    BitString s(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.set(i, (rng() & 1U) != 0);
    }
    return s;
  };

  for (std::size_t r = 1; r <= spec.rounds(); ++r) {
    bool all_keys_ok = true;
    for (std::size_t k = 0; k < key_samples && all_keys_ok; ++k) {
      std::vector<BitString> keys;
      for (std::size_t t = 0; t < r; ++t) {
        keys.push_back(random_bits(spec.round_key_bits));
      }
      auto run = [&](BitString s) {
        for (const auto& key : keys) {
          s = round.forward(s, key);
        }
        return s;
      };
      // dependents[j] = number of input bits observed to influence output j
      std::vector<std::size_t> dependents(width, 0);
      for (std::size_t i = 0; i < width; ++i) {
        std::vector<bool> hit(width, false);
        for (std::size_t c = 0; c < contexts; ++c) {
          BitString in = exhaustive ? BitString::from_uint(c, width) : random_bits(width);
          if (exhaustive && in[i]) {
            continue;
          }
          const BitString a = run(in);
          in.flip(i);
          const BitString b = run(in);
          for (std::size_t j = 0; j < width; ++j) {
            if (a[j] != b[j]) {
              hit[j] = true;
            }
          }
        }
        for (std::size_t j = 0; j < width; ++j) {
          dependents[j] += hit[j] ? 1 : 0;
        }
      }
      for (auto d : dependents) {
        if (d < 2) {
          all_keys_ok = false;
          break;
        }
      }
    }
    if (all_keys_ok) {
      return {r, true};
    }
  }
  return {spec.rounds(), false};
}

}  // namespace elastic
