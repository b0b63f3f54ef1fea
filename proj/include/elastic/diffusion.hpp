#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "elastic/bitstring.hpp"
#include "elastic/engine.hpp"
#include "elastic/error.hpp"

namespace elastic {

// Black box with its key bits already fixed.
using KeyedFunction = std::function<BitString(const BitString&)>;

struct Exhaustive {};

struct Sampled {
  std::size_t count = std::size_t{1} << 14;
  std::uint64_t seed = 0xd1ff;
};

using Mode = std::variant<Exhaustive, Sampled>;

// Exhaustive enumeration visits 2^(width-1) contexts per input bit.
inline constexpr std::size_t kMaxExhaustiveBits = 20;

struct DiffusionCounts {
  std::uint64_t n00 = 0;
  std::uint64_t n01 = 0;
  std::uint64_t n10 = 0;
  std::uint64_t n11 = 0;
  std::uint64_t contexts = 0;

  std::uint64_t changed() const noexcept { return n01 + n10; }
  std::uint64_t unchanged() const noexcept { return n00 + n11; }
  double p_change() const noexcept {
    return contexts == 0 ? 0.0 : static_cast<double>(changed()) / static_cast<double>(contexts);
  }

  friend bool operator==(const DiffusionCounts&, const DiffusionCounts&) = default;
};

namespace detail {

inline BitString random_bits(std::mt19937_64& rng, std::size_t n) {
  BitString s(n);
  std::uint64_t pool = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) {
      pool = rng();
    }
    s.set(i, ((pool >> (i % 64)) & 1U) != 0);
  }
  return s;
}

inline void check_exhaustive(std::size_t width) {
  if (width > kMaxExhaustiveBits) {
    throw Error(ErrorKind::CostGuard, "exhaustive enumeration over " + std::to_string(width) +
                                          " bits refused (limit " +
                                          std::to_string(kMaxExhaustiveBits) + ")");
  }
}

// Calls visit(input_with_bit_i_clear, input_with_bit_i_set) once per context.
// Exhaustive contexts enumerate the other width-1 bits in counting order.
template <typename Visit>
void for_each_context(std::size_t width, std::size_t i, const Mode& mode, Visit&& visit) {
  if (i >= width) {
    throw Error(ErrorKind::InvalidArgument, "input bit " + std::to_string(i) +
                                                " outside " + std::to_string(width) + " bits");
  }
  if (std::holds_alternative<Exhaustive>(mode)) {
    check_exhaustive(width);
    const std::uint64_t total = std::uint64_t{1} << (width - 1);
    for (std::uint64_t c = 0; c < total; ++c) {
      // spread c over every position except i
      const std::size_t low_bits = width - 1 - i;  // positions after i
      const std::uint64_t low = c & ((std::uint64_t{1} << low_bits) - 1);
      const std::uint64_t high = c >> low_bits;
      const std::uint64_t v0 = (high << (low_bits + 1)) | low;
      BitString in0 = BitString::from_uint(v0, width);
      BitString in1 = in0;
      in1.set(i, true);
      visit(in0, in1);
    }
    return;
  }
  const auto& s = std::get<Sampled>(mode);
  std::mt19937_64 rng(s.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)));
  for (std::size_t c = 0; c < s.count; ++c) {
    BitString in0 = random_bits(rng, width);
    in0.set(i, false);
    BitString in1 = in0;
    in1.set(i, true);
    visit(in0, in1);
  }
}

}  // namespace detail

// Transition counts of output bit j when input bit i goes 0 -> 1 with all
// other input bits held at each context value.
inline DiffusionCounts experiment_a(const KeyedFunction& f, std::size_t width, std::size_t i,
                                    std::size_t j, const Mode& mode) {
  DiffusionCounts counts;
  detail::for_each_context(width, i, mode, [&](const BitString& in0, const BitString& in1) {
    const BitString out0 = f(in0);
    const BitString out1 = f(in1);
    if (j >= out0.size()) {
      throw Error(ErrorKind::InvalidArgument, "output bit outside function range");
    }
    const bool a = out0[j];
    const bool b = out1[j];
    if (!a && !b) ++counts.n00;
    if (!a && b) ++counts.n01;
    if (a && !b) ++counts.n10;
    if (a && b) ++counts.n11;
    ++counts.contexts;
  });
  return counts;
}

// f on the leftmost L bits followed by the exor/swap with y extra input bits:
// T = out[k..k+y) (wrapping mod L), out[k..k+y) ^= tail, tail' = T.
inline KeyedFunction exor_swap_extension(KeyedFunction f, std::size_t width, std::size_t y,
                                         std::size_t k) {
  if (y > width) {
    throw Error(ErrorKind::InvalidArgument, "extension wider than the black box");
  }
  if (y > 0 && k >= width) {
    throw Error(ErrorKind::InvalidArgument, "swap offset outside the black box output");
  }
  return [f = std::move(f), width, y, k](const BitString& in) {
    BitString left = f(in.slice(0, width));
    const BitString tail = in.slice(width, width + y);
    const BitString saved = slice_wrapping(left, k, y, width);
    left = write_wrapping(left, k, saved ^ tail, width);
    return left.concat(saved);
  };
}

// Output positions of the extension that receive the exor: (k + t) mod L.
inline std::vector<std::size_t> exor_window(std::size_t width, std::size_t y, std::size_t k) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < y; ++t) {
    out.push_back((k + t) % width);
  }
  return out;
}

// Experiment A run on the exor/swap extension of f (L + y input bits).
inline DiffusionCounts experiment_b(const KeyedFunction& f, std::size_t width, std::size_t i,
                                    std::size_t j, std::size_t y, std::size_t k,
                                    const Mode& mode) {
  return experiment_a(exor_swap_extension(f, width, y, k), width + y, i, j, mode);
}

// Closed-form window counts as published for the exor step:
//   n00 = (n00 + n01)/2 2^y, n11 = (n11 + n10)/2 2^y,
//   n01 = (n01 + n00)/2 2^y, n10 = (n10 + n11)/2 2^y.
// Values are doubled-then-halved so odd sums stay exact as rationals;
// `exact` is false when any of them is not an integer.
struct CountPrediction {
  DiffusionCounts counts;
  bool exact = true;
};

inline CountPrediction published_window_prediction(const DiffusionCounts& a, std::size_t y) {
  const std::uint64_t scale = std::uint64_t{1} << y;
  CountPrediction p;
  auto half = [&](std::uint64_t sum) {
    const std::uint64_t twice = sum * scale;
    if (twice % 2 != 0) {
      p.exact = false;
    }
    return twice / 2;
  };
  p.counts.n00 = half(a.n00 + a.n01);
  p.counts.n11 = half(a.n11 + a.n10);
  p.counts.n01 = half(a.n01 + a.n00);
  p.counts.n10 = half(a.n10 + a.n11);
  p.counts.contexts = a.contexts * scale;
  return p;
}

// Counts outside the window: every A count repeated once per tail value.
inline DiffusionCounts scaled_counts(const DiffusionCounts& a, std::size_t y) {
  const std::uint64_t scale = std::uint64_t{1} << y;
  return {a.n00 * scale, a.n01 * scale, a.n10 * scale, a.n11 * scale, a.contexts * scale};
}

// Per (input i, output j): number of contexts in which flipping i flipped j.
class InfluenceMatrix {
 public:
  InfluenceMatrix() = default;
  InfluenceMatrix(std::size_t inputs, std::size_t outputs)
      : inputs_(inputs), outputs_(outputs), flips_(inputs * outputs, 0), contexts_(inputs, 0) {}

  std::size_t inputs() const noexcept { return inputs_; }
  std::size_t outputs() const noexcept { return outputs_; }

  std::uint64_t flips(std::size_t i, std::size_t j) const { return flips_.at(i * outputs_ + j); }
  std::uint64_t contexts(std::size_t i) const { return contexts_.at(i); }

  double probability(std::size_t i, std::size_t j) const {
    const auto c = contexts(i);
    return c == 0 ? 0.0 : static_cast<double>(flips(i, j)) / static_cast<double>(c);
  }

  bool influenced(std::size_t i, std::size_t j) const { return flips(i, j) > 0; }

  std::size_t influenced_count() const {
    std::size_t n = 0;
    for (auto f : flips_) {
      n += f > 0 ? 1 : 0;
    }
    return n;
  }

  bool complete() const { return influenced_count() == flips_.size(); }

  void record(std::size_t i, const BitString& out0, const BitString& out1) {
    for (std::size_t j = 0; j < outputs_; ++j) {
      if (out0[j] != out1[j]) {
        ++flips_[i * outputs_ + j];
      }
    }
    ++contexts_[i];
  }

  std::string to_csv() const {
    std::ostringstream os;
    os << "i,j,flips,contexts\n";
    for (std::size_t i = 0; i < inputs_; ++i) {
      for (std::size_t j = 0; j < outputs_; ++j) {
        os << i << ',' << j << ',' << flips(i, j) << ',' << contexts(i) << '\n';
      }
    }
    return os.str();
  }

  // One row per input bit; '#' influenced, '.' not.
  std::string table() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < inputs_; ++i) {
      os << std::setw(4) << i << ' ';
      for (std::size_t j = 0; j < outputs_; ++j) {
        os << (influenced(i, j) ? '#' : '.');
      }
      os << '\n';
    }
    os << "influenced " << influenced_count() << " / " << flips_.size() << '\n';
    return os.str();
  }

  friend bool operator==(const InfluenceMatrix&, const InfluenceMatrix&) = default;

 private:
  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  std::vector<std::uint64_t> flips_;
  std::vector<std::uint64_t> contexts_;
};

inline InfluenceMatrix influence_matrix(const KeyedFunction& f, std::size_t width,
                                        const Mode& mode) {
  const std::size_t outputs = f(BitString(width)).size();
  InfluenceMatrix m(width, outputs);
  for (std::size_t i = 0; i < width; ++i) {
    detail::for_each_context(width, i, mode, [&](const BitString& in0, const BitString& in1) {
      m.record(i, f(in0), f(in1));
    });
  }
  return m;
}

struct DiffusionRounds {
  std::size_t rounds = 0;
  bool converged = false;
  std::vector<std::size_t> influenced_by_round;  // index r-1
};

// Least r <= max_rounds whose influence matrix is complete. `build(r)` returns
// the r-round keyed function.
inline DiffusionRounds complete_diffusion_rounds(
    const std::function<KeyedFunction(std::size_t)>& build, std::size_t width,
    std::size_t max_rounds, const Mode& mode) {
  if (max_rounds == 0) {
    throw Error(ErrorKind::InvalidArgument, "max_rounds must be >= 1");
  }
  DiffusionRounds result;
  for (std::size_t r = 1; r <= max_rounds; ++r) {
    const InfluenceMatrix m = influence_matrix(build(r), width, mode);
    result.influenced_by_round.push_back(m.influenced_count());
    if (m.complete()) {
      result.rounds = r;
      result.converged = true;
      return result;
    }
  }
  result.rounds = max_rounds;
  return result;
}

// Full E_n (whitening, permutations, rounds) with a fixed key.
template <RoundFunction R>
KeyedFunction elastic_function(R round, ElasticParams params, ExpandedKey key) {
  return [round = std::move(round), params, key = std::move(key)](const BitString& in) {
    return encrypt(round, in, key, params);
  };
}

// The p.rounds E_n rounds alone (no whitening, no permutation), keyed by
// consecutive (cycle key, tail key) blocks of `material`. Zero rounds is the
// identity.
template <RoundFunction R>
KeyedFunction rounds_function(R round, ElasticParams p, BitString material) {
  const std::size_t need = p.rounds * (cycle_key_bits(round.spec(), p.level - 1) + p.tail_bits);
  if (material.size() < need) {
    throw Error(ErrorKind::KeyUnderrun, "rounds need " + std::to_string(need) +
                                            " key bits, got " + std::to_string(material.size()));
  }
  return [round = std::move(round), p, material = std::move(material)](const BitString& in) {
    KeyCursor cursor(material);
    return run_rounds(round, in, p, cursor, 0, p.rounds);
  };
}

// Key bits consumed by rounds_function.
inline std::size_t rounds_key_bits(const ElasticParams& p, const CipherSpec& spec) {
  return p.rounds * (cycle_key_bits(spec, p.level - 1) + p.tail_bits);
}

// `count` successive level-m cycles (a fixed-length E_m without whitening),
// each with its own slice of `key_material`.
template <RoundFunction R>
KeyedFunction cycles_function(R round, unsigned level, BitString key_material, std::size_t count) {
  const std::size_t need = count * cycle_key_bits(round.spec(), level);
  if (key_material.size() < need) {
    throw Error(ErrorKind::KeyUnderrun, "cycle chain needs " + std::to_string(need) +
                                            " key bits, got " +
                                            std::to_string(key_material.size()));
  }
  return [round = std::move(round), level, key_material = std::move(key_material),
          count](const BitString& in) {
    KeyCursor cursor(key_material);
    BitString s = in;
    for (std::size_t t = 0; t < count; ++t) {
      s = cycle_function(round, s, level, cursor);
    }
    return s;
  };
}

enum class Verdict {
  ElasticLike,        // a contiguous window sits at 1/2 while other bits deviate
  Indistinguishable,  // no separation between bit groups
  Structured,         // deviations present but not in the elastic pattern
};

inline const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::ElasticLike: return "elastic-like";
    case Verdict::Indistinguishable: return "indistinguishable";
    case Verdict::Structured: return "structured";
  }
  return "?";
}

struct DistinguisherReport {
  std::vector<double> flip_probability;  // per output bit
  std::vector<bool> near_half;           // |p - 1/2| <= threshold
  std::size_t window_start = 0;
  std::size_t window_length = 0;         // cyclic run of near-half bits
  Verdict verdict = Verdict::Indistinguishable;

  std::string table() const {
    std::ostringstream os;
    os << "bit  p(flip)  near-1/2\n";
    for (std::size_t j = 0; j < flip_probability.size(); ++j) {
      os << std::setw(3) << j << "  " << std::fixed << std::setprecision(4)
         << flip_probability[j] << "   " << (near_half[j] ? "yes" : "no") << '\n';
    }
    os << "window " << window_start << " +" << window_length << "  verdict " << to_string(verdict)
       << '\n';
    return os.str();
  }
};

// Per trial: random input, random single input bit flipped, tally which
// output bits flip. Looks for the signature of an exored tail window: a
// contiguous (cyclic) group at ~1/2 with the remaining bits away from 1/2.
// `window` > 0 additionally requires the group to have exactly that size.
inline DistinguisherReport distinguish(const KeyedFunction& blackbox, std::size_t width,
                                       std::size_t trials, double threshold,
                                       std::uint64_t seed = 0xd15, std::size_t window = 0) {
  if (trials < 1000) {
    throw Error(ErrorKind::InvalidArgument, "distinguisher needs at least 1000 trials");
  }
  if (width == 0) {
    throw Error(ErrorKind::InvalidArgument, "empty black box input");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> flips;
  for (std::size_t t = 0; t < trials; ++t) {
    BitString in = detail::random_bits(rng, width);
    const BitString out0 = blackbox(in);
    in.flip(rng() % width);
    const BitString out1 = blackbox(in);
    if (flips.empty()) {
      flips.assign(out0.size(), 0);
    }
    for (std::size_t j = 0; j < out0.size(); ++j) {
      flips[j] += out0[j] != out1[j] ? 1 : 0;
    }
  }

  DistinguisherReport rep;
  const std::size_t n = flips.size();
  std::size_t flagged = 0;
  for (auto f : flips) {
    const double p = static_cast<double>(f) / static_cast<double>(trials);
    rep.flip_probability.push_back(p);
    rep.near_half.push_back(std::fabs(p - 0.5) <= threshold);
    flagged += rep.near_half.back() ? 1 : 0;
  }
  if (flagged == n) {
    rep.window_length = n;
    rep.verdict = Verdict::Indistinguishable;
    return rep;
  }
  if (flagged == 0) {
    rep.verdict = Verdict::Structured;
    return rep;
  }
  // Longest cyclic run of flagged bits; start it after an unflagged bit.
  std::size_t start = 0;
  while (rep.near_half[start]) {
    ++start;
  }
  std::size_t best_len = 0;
  std::size_t best_start = 0;
  std::size_t runs = 0;
  for (std::size_t t = 1; t <= n; ++t) {
    const std::size_t pos = (start + t) % n;
    if (!rep.near_half[pos]) {
      continue;
    }
    const std::size_t run_start = pos;
    std::size_t len = 0;
    while (rep.near_half[(start + t) % n] && t <= n) {
      ++len;
      ++t;
    }
    ++runs;
    if (len > best_len) {
      best_len = len;
      best_start = run_start;
    }
  }
  rep.window_start = best_start;
  rep.window_length = best_len;
  const bool single_run = runs == 1;
  const bool size_ok = window == 0 || best_len == window;
  rep.verdict = single_run && size_ok ? Verdict::ElasticLike : Verdict::Structured;
  return rep;
}

}  // namespace elastic
