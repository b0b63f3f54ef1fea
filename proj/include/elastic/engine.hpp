#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "elastic/bitstring.hpp"
#include "elastic/cipher_core.hpp"
#include "elastic/error.hpp"
#include "elastic/keystream.hpp"
#include "elastic/params.hpp"

namespace elastic {

// Forward reader over a region of key material; mirrors the key pointer `k`.
class KeyCursor {
 public:
  explicit KeyCursor(const BitString& key) : KeyCursor(key, 0, key.size()) {}

  KeyCursor(const BitString& key, std::size_t begin, std::size_t end)
      : key_(&key), begin_(begin), pos_(begin), end_(end) {
    if (begin > end || end > key.size()) {
      throw Error(ErrorKind::InvariantViolation, "key cursor region out of range");
    }
  }

  BitString take(std::size_t n) {
    if (n > end_ - pos_) {
      throw Error(ErrorKind::KeyUnderrun, "need " + std::to_string(n) + " key bits, " +
                                              std::to_string(end_ - pos_) + " left");
    }
    BitString out = key_->slice(pos_, pos_ + n);
    pos_ += n;
    return out;
  }

  std::size_t consumed() const noexcept { return pos_ - begin_; }
  std::size_t remaining() const noexcept { return end_ - pos_; }

 private:
  const BitString* key_;
  std::size_t begin_;
  std::size_t pos_;
  std::size_t end_;
};

// Reads a key region back to front; used by the inverse cycle.
class ReverseKeyCursor {
 public:
  explicit ReverseKeyCursor(const BitString& key) : ReverseKeyCursor(key, 0, key.size()) {}

  ReverseKeyCursor(const BitString& key, std::size_t begin, std::size_t end)
      : key_(&key), begin_(begin), pos_(end), end_(end) {
    if (begin > end || end > key.size()) {
      throw Error(ErrorKind::InvariantViolation, "key cursor region out of range");
    }
  }

  // Returns [pos - n, pos) and moves pos back by n.
  BitString take_back(std::size_t n) {
    if (n > pos_ - begin_) {
      throw Error(ErrorKind::KeyUnderrun, "need " + std::to_string(n) + " key bits, " +
                                              std::to_string(pos_ - begin_) + " left");
    }
    pos_ -= n;
    return key_->slice(pos_, pos_ + n);
  }

  std::size_t consumed() const noexcept { return end_ - pos_; }
  std::size_t remaining() const noexcept { return pos_ - begin_; }

 private:
  const BitString* key_;
  std::size_t begin_;
  std::size_t pos_;
  std::size_t end_;
};

// Per-call instrumentation. Pass a pointer to collect, nullptr to skip.
struct EngineTrace {
  std::size_t key_bits = 0;
  std::size_t base_rounds = 0;            // E0 round invocations
  std::vector<std::size_t> cycle_calls;   // indexed by cycle level
  std::size_t elastic_rounds = 0;         // E_n rounds

  void record_cycle(unsigned level) {
    if (cycle_calls.size() <= level) {
      cycle_calls.resize(level + 1, 0);
    }
    ++cycle_calls[level];
  }

  std::size_t calls_at(unsigned level) const noexcept {
    return level < cycle_calls.size() ? cycle_calls[level] : 0;
  }
};

namespace detail {

inline void check_state(const BitString& s, std::size_t expect, const char* what) {
  if (s.size() != expect) {
    throw Error(ErrorKind::InvariantViolation, std::string(what) + " has " +
                                                   std::to_string(s.size()) + " bits, expected " +
                                                   std::to_string(expect));
  }
}

}  // namespace detail

// Cycle of E_m on 2^m L bits. Level 0 runs x E0 rounds; higher levels split
// the block into A || B and twice apply A = C_(m-1)(A), B ^= K, (A, B) = (A ^ B, A).
// The inner XOR consumes 2^(m-1) L key bits, the width of B.
template <RoundFunction R>
BitString cycle_function(const R& round, const BitString& state, unsigned m, KeyCursor& keys,
                         EngineTrace* trace = nullptr) {
  const CipherSpec& spec = round.spec();
  detail::check_state(state, (std::size_t{1} << m) * spec.block_bits, "cycle input");
  if (trace) {
    trace->record_cycle(m);
  }
  if (m == 0) {
    BitString s = state;
    for (std::size_t t = 0; t < spec.rounds_per_cycle; ++t) {
      s = round.forward(s, keys.take(spec.round_key_bits));
      if (trace) {
        ++trace->base_rounds;
      }
    }
    return s;
  }
  const std::size_t half = state.size() / 2;
  BitString a = state.slice(0, half);
  BitString b = state.slice(half, state.size());
  for (int it = 0; it < 2; ++it) {
    a = cycle_function(round, a, m - 1, keys, trace);
    b.xor_at(0, keys.take(half));
    BitString t = a;
    a.xor_at(0, b);
    b = std::move(t);
  }
  return a.concat(b);
}

// Inverse of cycle_function; `keys` must end exactly at this cycle's region.
template <RoundFunction R>
BitString cycle_function_inv(const R& round, const BitString& state, unsigned m,
                             ReverseKeyCursor& keys, EngineTrace* trace = nullptr) {
  const CipherSpec& spec = round.spec();
  detail::check_state(state, (std::size_t{1} << m) * spec.block_bits, "cycle input");
  if (trace) {
    trace->record_cycle(m);
  }
  if (m == 0) {
    BitString s = state;
    for (std::size_t t = 0; t < spec.rounds_per_cycle; ++t) {
      s = round.inverse(s, keys.take_back(spec.round_key_bits));
      if (trace) {
        ++trace->base_rounds;
      }
    }
    return s;
  }
  const std::size_t half = state.size() / 2;
  BitString a = state.slice(0, half);
  BitString b = state.slice(half, state.size());
  for (int it = 0; it < 2; ++it) {
    BitString prev_a = b;
    BitString keyed_b = a ^ b;
    keyed_b.xor_at(0, keys.take_back(half));
    a = cycle_function_inv(round, prev_a, m - 1, keys, trace);
    b = std::move(keyed_b);
  }
  return a.concat(b);
}

enum class Direction { Forward, Inverse };

// Placeholder key-dependent permutation: rotate left by (key as integer) mod b.
inline BitString key_dependent_permutation(const BitString& state, const BitString& key,
                                           Direction dir) {
  if (state.empty()) {
    return state;
  }
  const std::uint64_t amount = key.empty() ? 0 : key.to_uint() % state.size();
  const auto signed_amount = static_cast<std::int64_t>(amount);
  return rotate(state, dir == Direction::Forward ? signed_amount : -signed_amount);
}

// Swap position used by E_n round `round_index`: j starts at 0 and advances
// by one per round modulo 2^(n-1) L.
inline std::size_t swap_offset(const ElasticParams& p, std::size_t round_index) noexcept {
  return round_index % p.half_bits;
}

// One E_n round: cycle on the left part, tail key addition, then swap/exor
// through the (wrapping) window at j.
template <RoundFunction R>
BitString elastic_round(const R& round, const BitString& state, const ElasticParams& p,
                        std::size_t round_index, KeyCursor& keys, EngineTrace* trace = nullptr) {
  detail::check_state(state, p.block_bits, "round state");
  const std::size_t half = p.half_bits;
  const std::size_t y = p.tail_bits;
  BitString left = cycle_function(round, state.slice(0, half), p.level - 1, keys, trace);
  BitString tail = state.slice(half, half + y) ^ keys.take(y);
  const std::size_t j = swap_offset(p, round_index);
  BitString saved = slice_wrapping(left, j, y, half);
  left = write_wrapping(left, j, saved ^ tail, half);
  if (trace) {
    ++trace->elastic_rounds;
  }
  return left.concat(saved);
}

template <RoundFunction R>
BitString elastic_round_inv(const R& round, const BitString& state, const ElasticParams& p,
                            std::size_t round_index, ReverseKeyCursor& cycle_keys,
                            const BitString& tail_key, EngineTrace* trace = nullptr) {
  detail::check_state(state, p.block_bits, "round state");
  const std::size_t half = p.half_bits;
  const std::size_t y = p.tail_bits;
  const std::size_t j = swap_offset(p, round_index);
  BitString left = state.slice(0, half);
  const BitString saved = state.slice(half, half + y);
  const BitString keyed_tail = slice_wrapping(left, j, y, half) ^ saved;
  left = write_wrapping(left, j, saved, half);
  const BitString tail = keyed_tail ^ tail_key;
  left = cycle_function_inv(round, left, p.level - 1, cycle_keys, trace);
  if (trace) {
    ++trace->elastic_rounds;
  }
  return left.concat(tail);
}

// `count` E_n rounds without whitening or permutation, starting at E_n round
// `first_round` (which fixes the swap offsets).
template <RoundFunction R>
BitString run_rounds(const R& round, BitString state, const ElasticParams& p, KeyCursor& keys,
                     std::size_t first_round, std::size_t count, EngineTrace* trace = nullptr) {
  for (std::size_t t = 0; t < count; ++t) {
    state = elastic_round(round, state, p, first_round + t, keys, trace);
  }
  return state;
}

namespace detail {

inline void check_key(const ExpandedKey& key, const ElasticParams& p) {
  if (key.size() != p.key_bits || key.rounds() != p.rounds) {
    throw Error(ErrorKind::KeyMismatch, "expanded key has " + std::to_string(key.size()) +
                                            " bits / " + std::to_string(key.rounds()) +
                                            " rounds, parameters need " +
                                            std::to_string(p.key_bits) + " / " +
                                            std::to_string(p.rounds));
  }
}

}  // namespace detail

// Level-n elastic encryption. Walks the key with a single forward pointer in
// consumption order; trace->key_bits reports how many bits were read.
template <RoundFunction R>
BitString encrypt(const R& round, const BitString& plain, const ExpandedKey& key,
                  const ElasticParams& p, EngineTrace* trace = nullptr) {
  detail::check_state(plain, p.block_bits, "plaintext");
  detail::check_key(key, p);
  KeyCursor cursor(key.material());
  BitString s = plain ^ cursor.take(p.block_bits);
  s = key_dependent_permutation(s, cursor.take(p.perm_key_bits), Direction::Forward);
  s = run_rounds(round, std::move(s), p, cursor, 0, p.rounds, trace);
  s = key_dependent_permutation(s, cursor.take(p.perm_key_bits), Direction::Forward);
  s = s ^ cursor.take(p.block_bits);
  if (trace) {
    trace->key_bits += cursor.consumed();
  }
  return s;
}

// Inverse of encrypt. Key regions come straight from the precomputed layout,
// so rounds are undone in reverse without replaying the forward pointer.
template <RoundFunction R>
BitString decrypt(const R& round, const BitString& cipher, const ExpandedKey& key,
                  const ElasticParams& p, EngineTrace* trace = nullptr) {
  detail::check_state(cipher, p.block_bits, "ciphertext");
  detail::check_key(key, p);
  const BitString& k = key.material();
  const std::size_t total = k.size();
  const std::size_t b = p.block_bits;
  const std::size_t lp = p.perm_key_bits;

  BitString s = cipher ^ k.slice(total - b, total);
  s = key_dependent_permutation(s, k.slice(total - b - lp, total - b), Direction::Inverse);
  for (std::size_t i = p.rounds; i-- > 0;) {
    const RoundRegion& reg = key.region(i);
    ReverseKeyCursor cycle_keys(k, reg.cycle_offset, reg.cycle_offset + reg.cycle_bits);
    const BitString tail_key = k.slice(reg.tail_offset, reg.tail_offset + reg.tail_bits);
    s = elastic_round_inv(round, s, p, i, cycle_keys, tail_key, trace);
  }
  s = key_dependent_permutation(s, k.slice(b, b + lp), Direction::Inverse);
  return s ^ k.slice(0, b);
}

// Round, parameters and key bundled for one message length.
template <RoundFunction R>
class ElasticCipher {
 public:
  ElasticCipher(R round, ElasticParams params, ExpandedKey key)
      : round_(std::move(round)), params_(params), key_(std::move(key)) {
    detail::check_key(key_, params_);
  }

  static ElasticCipher for_length(R round, std::size_t plain_len, const MasterKey& master) {
    const ElasticParams p = init_params(plain_len, round.spec());
    ExpandedKey key = ExpandedKey::derive(master, p, round.spec());
    return ElasticCipher(std::move(round), p, std::move(key));
  }

  BitString encrypt(const BitString& plain, EngineTrace* trace = nullptr) const {
    return elastic::encrypt(round_, plain, key_, params_, trace);
  }

  BitString decrypt(const BitString& cipher, EngineTrace* trace = nullptr) const {
    return elastic::decrypt(round_, cipher, key_, params_, trace);
  }

  const R& round() const noexcept { return round_; }
  const ElasticParams& params() const noexcept { return params_; }
  const ExpandedKey& key() const noexcept { return key_; }

 private:
  R round_;
  ElasticParams params_;
  ExpandedKey key_;
};

}  // namespace elastic
