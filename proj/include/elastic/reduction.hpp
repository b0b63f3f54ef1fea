#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "elastic/bitstring.hpp"
#include "elastic/engine.hpp"
#include "elastic/error.hpp"
#include "elastic/params.hpp"

namespace elastic {

// s (P0, Pr) pairs, each 2^(n-1) L bits, related by r cycles.
struct PlainCipherPairs {
  std::vector<BitString> plain;
  std::vector<BitString> cipher;
  std::size_t rounds = 0;

  std::size_t size() const noexcept { return plain.size(); }

  void validate() const {
    if (plain.empty() || plain.size() != cipher.size()) {
      throw Error(ErrorKind::InvalidArgument, "pair set needs s >= 1 matching pairs");
    }
    for (std::size_t t = 0; t < plain.size(); ++t) {
      if (plain[t].size() != plain[0].size() || cipher[t].size() != plain[0].size()) {
        throw Error(ErrorKind::InvalidArgument, "pairs must all have the same length");
      }
    }
    if (rounds == 0) {
      throw Error(ErrorKind::InvalidArgument, "pair set needs r >= 1");
    }
  }
};

// Plaintexts extended with y zero bits; ciphertexts keep only the leftmost
// bits, the tail is a wildcard.
struct PaddedPairs {
  std::vector<BitString> plain;   // half + y bits
  std::vector<BitString> cipher;  // half bits, compared against the output's left part
  std::size_t tail_bits = 0;

  std::size_t size() const noexcept { return plain.size(); }
};

inline PaddedPairs pad_pairs(const std::vector<BitString>& plain,
                             const std::vector<BitString>& cipher, std::size_t y) {
  PaddedPairs out;
  out.tail_bits = y;
  for (const auto& p : plain) {
    out.plain.push_back(p.concat(BitString(y)));
  }
  out.cipher = cipher;
  return out;
}

inline PaddedPairs pad_pairs(const PlainCipherPairs& pairs, std::size_t y) {
  return pad_pairs(pairs.plain, pairs.cipher, y);
}

// Keys of one reduced E_n round.
struct RoundKey {
  BitString cycle_key;  // g(n-1) bits
  BitString tail_key;   // y bits
  std::size_t swap_offset = 0;

  friend bool operator==(const RoundKey&, const RoundKey&) = default;
};

using RoundKeySet = std::vector<RoundKey>;

// Concatenated key bits, round by round; defines candidate order.
inline BitString flatten(const RoundKeySet& keys) {
  BitString out;
  for (const auto& k : keys) {
    out = out.concat(k.cycle_key).concat(k.tail_key);
  }
  return out;
}

struct OracleResult {
  std::vector<RoundKeySet> candidates;
  std::uint64_t op_cost = 0;
};

// (padded pairs, rounds, index of the first round) -> every consistent key set.
using RecoveryOracle =
    std::function<OracleResult(const PaddedPairs&, std::size_t rounds, std::size_t first_round)>;

namespace detail {

// XORs `delta` onto the output of a level-m cycle by adjusting its key:
//  m = 0: into the last round key (rounds end with the key XOR);
//  m > 0: output is (A2 ^ B2, A2), so the second inner XOR key absorbs
//         dA ^ dB and the second sub-cycle absorbs dB.
inline void absorb_output_delta(BitString& key, std::size_t offset, const CipherSpec& spec,
                                unsigned m, const BitString& delta) {
  if (m == 0) {
    const std::size_t last = offset + spec.cycle_key_bits() - spec.round_key_bits;
    key.xor_at(last, delta);
    return;
  }
  const std::size_t half = (std::size_t{1} << (m - 1)) * spec.block_bits;
  const std::size_t sub = cycle_key_bits(spec, m - 1);
  const BitString da = delta.slice(0, half);
  const BitString db = delta.slice(half, 2 * half);
  const std::size_t second_sub = offset + sub + half;
  const std::size_t second_xor = second_sub + sub;
  key.xor_at(second_xor, da ^ db);
  absorb_output_delta(key, second_sub, spec, m - 1, db);
}

}  // namespace detail

// Folds the tail key placed at the wrapped window j into the cycle key, so
// that C(result, P) equals the left output of the round on P || 0^y.
inline BitString convert_round_key(const BitString& kc_prime, const BitString& kw_prime,
                                   std::size_t j, const CipherSpec& spec, unsigned level) {
  if (kc_prime.size() != cycle_key_bits(spec, level)) {
    throw Error(ErrorKind::KeyMismatch, "cycle key has " + std::to_string(kc_prime.size()) +
                                            " bits, level " + std::to_string(level) + " needs " +
                                            std::to_string(cycle_key_bits(spec, level)));
  }
  const std::size_t width = (std::size_t{1} << level) * spec.block_bits;
  if (j >= width || kw_prime.size() > width) {
    throw Error(ErrorKind::InvalidArgument, "swap window outside the cycle output");
  }
  const BitString delta = write_wrapping(BitString(width), j, kw_prime, width);
  BitString out = kc_prime;
  detail::absorb_output_delta(out, 0, spec, level, delta);
  return out;
}

// Left output of reduced E_n rounds [first_round, first_round + keys.size())
// on `state`, without whitening or permutation.
template <RoundFunction R>
BitString reduced_rounds(const R& round, const BitString& state, const ElasticParams& p,
                         const RoundKeySet& keys, std::size_t first_round,
                         EngineTrace* trace = nullptr) {
  BitString s = state;
  for (std::size_t t = 0; t < keys.size(); ++t) {
    const BitString material = keys[t].cycle_key.concat(keys[t].tail_key);
    KeyCursor cursor(material);
    s = elastic_round(round, s, p, first_round + t, cursor, trace);
  }
  return s;
}

inline constexpr std::size_t kMaxJointKeyBits = 24;

// Exhaustive stand-in for a round-key recovery attack. Enumerates the joint
// key space depth-first in increasing key order, so candidates come out
// lexicographically sorted. op_cost = enumerated keys x pairs.
template <RoundFunction R>
RecoveryOracle brute_force_oracle(R round, ElasticParams p, std::size_t space_bound) {
  const std::size_t per_round = cycle_key_bits(round.spec(), p.level - 1) + p.tail_bits;
  if (per_round > space_bound) {
    throw Error(ErrorKind::CostGuard, "per-round key space 2^" + std::to_string(per_round) +
                                          " exceeds bound 2^" + std::to_string(space_bound));
  }
  return [round = std::move(round), p, per_round](const PaddedPairs& pairs, std::size_t rounds,
                                                  std::size_t first_round) {
    if (rounds * per_round > kMaxJointKeyBits) {
      throw Error(ErrorKind::CostGuard, "joint key space 2^" + std::to_string(rounds * per_round) +
                                            " exceeds 2^" + std::to_string(kMaxJointKeyBits));
    }
    const std::size_t cycle_bits = per_round - p.tail_bits;
    OracleResult result;
    RoundKeySet chosen(rounds);

    std::function<void(std::size_t, const std::vector<BitString>&)> search =
        [&](std::size_t depth, const std::vector<BitString>& states) {
          const std::uint64_t limit = std::uint64_t{1} << per_round;
          for (std::uint64_t v = 0; v < limit; ++v) {
            const BitString bits = BitString::from_uint(v, per_round);
            RoundKey key{bits.slice(0, cycle_bits), bits.slice(cycle_bits, per_round),
                         (first_round + depth) % p.half_bits};
            const BitString material = bits;
            std::vector<BitString> next;
            next.reserve(states.size());
            bool ok = true;
            result.op_cost += states.size();
            for (std::size_t t = 0; t < states.size() && ok; ++t) {
              KeyCursor cursor(material);
              next.push_back(elastic_round(round, states[t], p, first_round + depth, cursor));
              if (depth + 1 == rounds && next.back().slice(0, p.half_bits) != pairs.cipher[t]) {
                ok = false;
              }
            }
            if (!ok) {
              continue;
            }
            chosen[depth] = std::move(key);
            if (depth + 1 == rounds) {
              result.candidates.push_back(chosen);
            } else {
              search(depth + 1, next);
            }
          }
        };
    search(0, pairs.plain);
    return result;
  };
}

struct CostReport {
  std::size_t oracle_calls = 0;
  std::size_t cycle_evaluations = 0;
  std::size_t elastic_rounds = 0;  // E_n rounds computed by the reduction itself
  std::uint64_t oracle_ops = 0;
  double wall_seconds = 0.0;

  std::string table() const {
    std::ostringstream os;
    os << "oracle calls        " << oracle_calls << '\n'
       << "cycle evaluations   " << cycle_evaluations << '\n'
       << "E_n rounds computed " << elastic_rounds << '\n'
       << "oracle operations   " << oracle_ops << '\n'
       << "wall time (s)       " << wall_seconds << '\n';
    return os.str();
  }
};

struct ReductionStep {
  std::size_t rounds = 0;          // r' attacked at this step
  std::size_t candidates = 0;      // returned by the oracle
  BitString cycle_key;             // converted key of the peeled round
};

struct ReductionReport {
  std::vector<BitString> cycle_keys;  // r keys of E_(n-1) cycles
  std::vector<ReductionStep> steps;
  std::size_t verified_pairs = 0;
  CostReport cost;
};

// Applies `keys` as successive level-m cycles.
template <RoundFunction R>
BitString run_cycles(const R& round, const BitString& state, unsigned level,
                     const std::vector<BitString>& keys) {
  BitString s = state;
  for (const auto& k : keys) {
    KeyCursor cursor(k);
    s = cycle_function(round, s, level, cursor);
  }
  return s;
}

// Peels one round per oracle call: pad, attack r' rounds, take the smallest
// candidate, fold its tail key into its cycle key, advance every plaintext by
// one cycle, recurse on r' - 1. Throws ReductionFailed when a step has no
// candidate; `log` (if given) keeps the steps done so far.
template <RoundFunction R>
ReductionReport reduce(const PlainCipherPairs& pairs, const RecoveryOracle& oracle, const R& round,
                       const ElasticParams& p, ReductionReport* log = nullptr) {
  pairs.validate();
  if (pairs.plain[0].size() != p.half_bits) {
    throw Error(ErrorKind::InvalidArgument, "pairs must be 2^(n-1) L bits wide");
  }
  const auto start = std::chrono::steady_clock::now();
  const CipherSpec spec = round.spec();
  const unsigned level = p.level - 1;
  ReductionReport report;
  std::vector<BitString> current = pairs.plain;

  auto finish = [&] {
    report.cost.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (log) {
      *log = report;
    }
  };

  for (std::size_t step = 0; step < pairs.rounds; ++step) {
    const std::size_t remaining = pairs.rounds - step;
    const PaddedPairs padded = pad_pairs(current, pairs.cipher, p.tail_bits);
    OracleResult found = oracle(padded, remaining, step);
    ++report.cost.oracle_calls;
    report.cost.oracle_ops += found.op_cost;
    ReductionStep log_step{remaining, found.candidates.size(), {}};
    if (found.candidates.empty()) {
      report.steps.push_back(log_step);
      finish();
      throw Error(ErrorKind::ReductionFailed,
                  "oracle returned no candidate for " + std::to_string(remaining) +
                      " rounds at step " + std::to_string(step + 1) + " of " +
                      std::to_string(pairs.rounds));
    }
    const RoundKeySet* best = &found.candidates.front();
    for (const auto& c : found.candidates) {
      if (flatten(c) < flatten(*best)) {
        best = &c;
      }
    }
    for (std::size_t t = 0; t < padded.size(); ++t) {
      EngineTrace trace;
      const BitString out = reduced_rounds(round, padded.plain[t], p, *best, step, &trace);
      report.cost.elastic_rounds += trace.elastic_rounds;
      if (out.slice(0, p.half_bits) != padded.cipher[t]) {
        finish();
        throw Error(ErrorKind::ReductionFailed, "oracle candidate does not reproduce pair " +
                                                    std::to_string(t) + " (unsound oracle)");
      }
    }
    const RoundKey& first = best->front();
    log_step.cycle_key = convert_round_key(first.cycle_key, first.tail_key, first.swap_offset,
                                           spec, level);
    for (auto& s : current) {
      KeyCursor cursor(log_step.cycle_key);
      s = cycle_function(round, s, level, cursor);
      ++report.cost.cycle_evaluations;
    }
    report.cycle_keys.push_back(log_step.cycle_key);
    report.steps.push_back(std::move(log_step));
  }

  for (std::size_t t = 0; t < pairs.size(); ++t) {
    if (run_cycles(round, pairs.plain[t], level, report.cycle_keys) == pairs.cipher[t]) {
      ++report.verified_pairs;
    }
  }
  finish();
  return report;
}

// s random plaintexts pushed through r planted level-m cycles (E_(n-1)).
template <RoundFunction R>
PlainCipherPairs planted_cycle_pairs(const R& round, unsigned level,
                                     const std::vector<BitString>& cycle_keys, std::size_t s,
                                     std::uint64_t seed) {
  const std::size_t width = (std::size_t{1} << level) * round.spec().block_bits;
  std::mt19937_64 rng(seed);
  PlainCipherPairs pairs;
  pairs.rounds = cycle_keys.size();
  for (std::size_t t = 0; t < s; ++t) {
    BitString p(width);
    for (std::size_t b = 0; b < width; ++b) {
      p.set(b, (rng() & 1U) != 0);
    }
    pairs.cipher.push_back(run_cycles(round, p, level, cycle_keys));
    pairs.plain.push_back(std::move(p));
  }
  return pairs;
}

// s random plaintexts through planted reduced E_n rounds from a zero tail;
// the ciphertext is the left part of the output.
template <RoundFunction R>
PlainCipherPairs planted_elastic_pairs(const R& round, const ElasticParams& p,
                                       const RoundKeySet& keys, std::size_t s,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PlainCipherPairs pairs;
  pairs.rounds = keys.size();
  for (std::size_t t = 0; t < s; ++t) {
    BitString pl(p.half_bits);
    for (std::size_t b = 0; b < p.half_bits; ++b) {
      pl.set(b, (rng() & 1U) != 0);
    }
    const BitString out = reduced_rounds(round, pl.concat(BitString(p.tail_bits)), p, keys, 0);
    pairs.cipher.push_back(out.slice(0, p.half_bits));
    pairs.plain.push_back(std::move(pl));
  }
  return pairs;
}

}  // namespace elastic
