#pragma once

#include <bit>
#include <cstddef>
#include <sstream>
#include <string>

#include "elastic/cipher_core.hpp"
#include "elastic/error.hpp"

namespace elastic {

// Parameters of E_n for one message length.
struct ElasticParams {
  unsigned level = 0;           // n
  std::size_t half_bits = 0;    // 2^(n-1) L, the width fed to the cycle of E_(n-1)
  std::size_t tail_bits = 0;    // y
  std::size_t rounds = 0;       // r_n
  std::size_t block_bits = 0;   // b = 2^(n-1) L + y
  std::size_t perm_key_bits = 0;  // per permutation; both permutations use 2x this
  std::size_t key_bits = 0;     // l(K)

  std::string table() const {
    std::ostringstream os;
    os << "level n           " << level << '\n'
       << "half width        " << half_bits << '\n'
       << "tail bits y       " << tail_bits << '\n'
       << "rounds r_n        " << rounds << '\n'
       << "block bits b      " << block_bits << '\n'
       << "perm key bits     " << perm_key_bits << " (x2)\n"
       << "key bits l(K)     " << key_bits << '\n';
    return os.str();
  }
};

inline constexpr unsigned kMaxLevel = 40;

// ceil(log2 b): enough bits to name every rotation amount of a b-bit block.
inline std::size_t perm_key_bits(std::size_t block_bits) {
  if (block_bits <= 1) {
    return 0;
  }
  return static_cast<std::size_t>(std::bit_width(block_bits - 1));
}

// l_KC(m) by its defining recursion: g(0) = x * l_KR(0), g(m) = 2 (g(m-1) + 2^(m-1) L).
inline std::size_t cycle_key_bits(const CipherSpec& spec, unsigned level) {
  if (level == 0) {
    return spec.cycle_key_bits();
  }
  return 2 * (cycle_key_bits(spec, level - 1) + (std::size_t{1} << (level - 1)) * spec.block_bits);
}

// Closed form of the same budget: 2^m g(0) + m 2^m L.
inline std::size_t cycle_key_bits_closed_form(const CipherSpec& spec, unsigned level) {
  const std::size_t scale = std::size_t{1} << level;
  return scale * spec.cycle_key_bits() + level * scale * spec.block_bits;
}

// Total expanded-key length:
//   l(K) = {y + 2^(n-1) [L (n-1) + l_KR(0) x]} r_n + 2^n L + 2y + K_perm
// with K_perm covering both key-dependent permutations.
inline std::size_t key_length(const ElasticParams& p, const CipherSpec& spec) {
  const std::size_t half_scale = std::size_t{1} << (p.level - 1);
  const std::size_t per_round =
      p.tail_bits +
      half_scale * (spec.block_bits * (p.level - 1) + spec.round_key_bits * spec.rounds_per_cycle);
  return per_round * p.rounds + 2 * half_scale * spec.block_bits + 2 * p.tail_bits +
         2 * p.perm_key_bits;
}

// r_n = c0 + ceil(c0 y / 2^(n-1) L)
inline std::size_t elastic_rounds(const CipherSpec& spec, std::size_t half_bits,
                                  std::size_t tail_bits) {
  return spec.cycles + (spec.cycles * tail_bits + half_bits - 1) / half_bits;
}

// Builds the parameters for an explicit (n, y); 0 <= y <= 2^(n-1) L.
inline ElasticParams make_params(unsigned level, std::size_t tail_bits, const CipherSpec& spec) {
  spec.validate();
  if (level < 1 || level > kMaxLevel) {
    throw Error(ErrorKind::InvalidArgument, "level must be in 1.." + std::to_string(kMaxLevel));
  }
  ElasticParams p;
  p.level = level;
  p.half_bits = (std::size_t{1} << (level - 1)) * spec.block_bits;
  if (tail_bits > p.half_bits) {
    throw Error(ErrorKind::InvalidArgument, "tail bits exceed half width at level " +
                                                std::to_string(level));
  }
  p.tail_bits = tail_bits;
  p.rounds = elastic_rounds(spec, p.half_bits, tail_bits);
  p.block_bits = p.half_bits + tail_bits;
  p.perm_key_bits = perm_key_bits(p.block_bits);
  p.key_bits = key_length(p, spec);
  return p;
}

// Same parameters with r_n overridden (reduced-round variants).
inline ElasticParams with_rounds(ElasticParams p, std::size_t rounds, const CipherSpec& spec) {
  if (rounds == 0) {
    throw Error(ErrorKind::InvalidArgument, "round count must be >= 1");
  }
  p.rounds = rounds;
  p.key_bits = key_length(p, spec);
  return p;
}

// Level and tail for a message of `plain_len` bits; lengths <= L are rejected.
inline ElasticParams init_params(std::size_t plain_len, const CipherSpec& spec) {
  spec.validate();
  if (plain_len <= spec.block_bits) {
    throw Error(ErrorKind::UnsupportedLength,
                "message of " + std::to_string(plain_len) + " bits is not longer than L = " +
                    std::to_string(spec.block_bits));
  }
  unsigned level = 1;
  while ((std::size_t{1} << level) * spec.block_bits < plain_len) {
    ++level;
    if (level > kMaxLevel) {
      throw Error(ErrorKind::UnsupportedLength, "message too long");
    }
  }
  const std::size_t half = (std::size_t{1} << (level - 1)) * spec.block_bits;
  return make_params(level, plain_len - half, spec);
}

// Number of level-m rounds executed by one E_n encryption:
//   m > 0: r_n 2^(n-m);  m = 0: r_n 2^(n-1) x.
inline std::size_t rounds_at_level(const ElasticParams& p, unsigned m, const CipherSpec& spec) {
  if (m > p.level) {
    throw Error(ErrorKind::InvalidArgument, "level " + std::to_string(m) + " exceeds n = " +
                                                std::to_string(p.level));
  }
  if (m == 0) {
    return p.rounds * (std::size_t{1} << (p.level - 1)) * spec.rounds_per_cycle;
  }
  return p.rounds * (std::size_t{1} << (p.level - m));
}

}  // namespace elastic
