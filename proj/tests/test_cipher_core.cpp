#include <gtest/gtest.h>

#include <random>
#include <set>

#include "elastic/cipher_core.hpp"

using namespace elastic;

namespace {

BitString random_bits(std::mt19937_64& rng, std::size_t n) {
  return BitString::from_uint(rng(), 64).slice(0, n);
}

// DES-like fixture: 16-bit Feistel whose F is the S-box layer on the right
// half XOR the 8-bit round key. One round leaves the new left half a copy of
// the old right half, so the cycle needs two rounds.
class HalfFeistel16 {
 public:
  HalfFeistel16() : spec_{"feistel16", 16, 1, 4, 8} {}
  const CipherSpec& spec() const { return spec_; }

  static std::uint8_t f(std::uint8_t half, std::uint8_t key) {
    const auto v = static_cast<std::uint8_t>(half ^ key);
    return static_cast<std::uint8_t>((detail::kSbox[v >> 4] << 4) | detail::kSbox[v & 0xF]);
  }

  BitString forward(const BitString& s, const BitString& k) const {
    const auto l = static_cast<std::uint8_t>(s.slice(0, 8).to_uint());
    const auto r = static_cast<std::uint8_t>(s.slice(8, 16).to_uint());
    const auto key = static_cast<std::uint8_t>(k.to_uint());
    return BitString::from_uint(r, 8).concat(BitString::from_uint(l ^ f(r, key), 8));
  }

  BitString inverse(const BitString& s, const BitString& k) const {
    const auto l = static_cast<std::uint8_t>(s.slice(0, 8).to_uint());
    const auto r = static_cast<std::uint8_t>(s.slice(8, 16).to_uint());
    const auto key = static_cast<std::uint8_t>(k.to_uint());
    return BitString::from_uint(r ^ f(l, key), 8).concat(BitString::from_uint(l, 8));
  }

 private:
  CipherSpec spec_;
};

static_assert(RoundFunction<Sp16>);
static_assert(RoundFunction<Sp8>);
static_assert(RoundFunction<IdentityRound>);
static_assert(RoundFunction<HalfFeistel16>);

}  // namespace

TEST(CipherCore, ToySpecs) {
  const Sp16 sp16;
  EXPECT_EQ(sp16.spec().block_bits, 16U);
  EXPECT_EQ(sp16.spec().rounds_per_cycle, 1U);
  EXPECT_EQ(sp16.spec().cycles, 4U);
  EXPECT_EQ(sp16.spec().rounds(), 4U);
  EXPECT_EQ(sp16.spec().round_key_bits, 16U);
  const Sp8 sp8;
  EXPECT_EQ(sp8.spec().cycles, 2U);
  EXPECT_EQ(sp8.spec().round_key_bits, 8U);
  EXPECT_NE(sp16.spec().table().find("rounds (r0)       4"), std::string::npos);
}

// Frozen with tests/oracles/elastic_ref.py.
TEST(CipherCore, Sp16FrozenVectors) {
  const Sp16 sp16;
  EXPECT_EQ(sp16.forward(BitString(16), BitString(16)).to_hex(), "cccc");
  EXPECT_EQ(sp16.forward(BitString::from_hex("1234"), BitString::from_hex("abcd")).to_hex(),
            "8e16");
}

TEST(CipherCore, Sp8FrozenVectors) {
  const Sp8 sp8;
  EXPECT_EQ(sp8.forward(BitString(8), BitString(8)).to_hex(), "99");
  EXPECT_EQ(sp8.forward(BitString::from_hex("a5"), BitString::from_hex("3c")).to_hex(), "ee");
}

TEST(CipherCore, Sp16InverseRandom) {
  const Sp16 sp16;
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10000; ++t) {
    const auto s = random_bits(rng, 16);
    const auto k = random_bits(rng, 16);
    ASSERT_EQ(sp16.inverse(sp16.forward(s, k), k), s);
  }
}

TEST(CipherCore, Sp8InverseExhaustive) {
  const Sp8 sp8;
  std::mt19937_64 rng(2);
  for (int key = 0; key < 16; ++key) {
    const auto k = random_bits(rng, 8);
    for (std::uint64_t v = 0; v < 256; ++v) {
      const auto s = BitString::from_uint(v, 8);
      ASSERT_EQ(sp8.inverse(sp8.forward(s, k), k), s);
    }
  }
}

TEST(CipherCore, WhiteningIsLastOperation) {
  const Sp16 sp16;
  const Sp8 sp8;
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto s16 = random_bits(rng, 16);
    const auto k16 = random_bits(rng, 16);
    const auto base16 = sp16.forward(s16, k16);
    const auto s8 = random_bits(rng, 8);
    const auto k8 = random_bits(rng, 8);
    const auto base8 = sp8.forward(s8, k8);
    for (std::size_t bit = 0; bit < 16; ++bit) {
      auto k = k16;
      k.flip(bit);
      auto expect = base16;
      expect.flip(bit);
      ASSERT_EQ(sp16.forward(s16, k), expect);
    }
    for (std::size_t bit = 0; bit < 8; ++bit) {
      auto k = k8;
      k.flip(bit);
      auto expect = base8;
      expect.flip(bit);
      ASSERT_EQ(sp8.forward(s8, k), expect);
    }
  }
}

TEST(CipherCore, LengthMismatchThrows) {
  const Sp16 sp16;
  EXPECT_THROW((void)sp16.forward(BitString(15), BitString(16)), Error);
  EXPECT_THROW((void)sp16.forward(BitString(16), BitString(8)), Error);
  const Sp8 sp8;
  EXPECT_THROW((void)sp8.inverse(BitString(16), BitString(8)), Error);
}

TEST(CipherCore, FullCompositionIsBijective) {
  std::mt19937_64 rng(4);
  const Sp8 sp8;
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<BitString> keys;
    for (std::size_t r = 0; r < sp8.spec().rounds(); ++r) {
      keys.push_back(random_bits(rng, 8));
    }
    std::set<std::uint64_t> images;
    for (std::uint64_t v = 0; v < 256; ++v) {
      auto s = BitString::from_uint(v, 8);
      for (const auto& k : keys) {
        s = sp8.forward(s, k);
      }
      images.insert(s.to_uint());
    }
    EXPECT_EQ(images.size(), 256U);
  }
  const Sp16 sp16;
  std::vector<std::uint32_t> keys;
  for (std::size_t r = 0; r < sp16.spec().rounds(); ++r) {
    keys.push_back(static_cast<std::uint32_t>(rng() & 0xFFFF));
  }
  std::set<std::uint32_t> images;
  for (std::uint32_t v = 0; v < 4096; ++v) {
    std::uint32_t s = static_cast<std::uint32_t>(rng() & 0xFFFF);
    const std::uint32_t in = s;
    for (auto k : keys) {
      s = Sp16::forward_word(s, k);
    }
    std::uint32_t back = s;
    for (auto it = keys.rbegin(); it != keys.rend(); ++it) {
      back = Sp16::inverse_word(back, *it);
    }
    ASSERT_EQ(back, in);
    images.insert(s);
  }
}

TEST(CipherCore, CyclesRegroupRounds) {
  // r0 rounds applied one by one equal c0 cycles of x rounds each.
  const Sp16 sp16;
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto s = random_bits(rng, 16);
    std::vector<BitString> keys;
    for (std::size_t r = 0; r < sp16.spec().rounds(); ++r) {
      keys.push_back(random_bits(rng, 16));
    }
    BitString flat = s;
    for (const auto& k : keys) {
      flat = sp16.forward(flat, k);
    }
    BitString grouped = s;
    const std::size_t x = sp16.spec().rounds_per_cycle;
    for (std::size_t c = 0; c < sp16.spec().cycles; ++c) {
      for (std::size_t r = 0; r < x; ++r) {
        grouped = sp16.forward(grouped, keys[c * x + r]);
      }
    }
    EXPECT_EQ(flat, grouped);
  }
}

TEST(CipherCore, CycleLengthSp16IsOneRound) {
  const auto det = detect_cycle_length(Sp16(), 3);
  EXPECT_TRUE(det.converged);
  EXPECT_EQ(det.rounds, 1U);
  const auto det8 = detect_cycle_length(Sp8(), 4);
  EXPECT_TRUE(det8.converged);
  EXPECT_EQ(det8.rounds, 1U);
}

TEST(CipherCore, CycleLengthIdentityNeverConverges) {
  const IdentityRound id(16, 4);
  const auto det = detect_cycle_length(id, 2);
  EXPECT_FALSE(det.converged);
  EXPECT_EQ(det.rounds, 4U);
}

TEST(CipherCore, CycleLengthDesLikeIsTwoRounds) {
  const HalfFeistel16 feistel;
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto s = random_bits(rng, 16);
    const auto k = random_bits(rng, 8);
    ASSERT_EQ(feistel.inverse(feistel.forward(s, k), k), s);
  }
  const auto det = detect_cycle_length(feistel, 3);
  EXPECT_TRUE(det.converged);
  EXPECT_EQ(det.rounds, 2U);
}

TEST(CipherCore, CycleDetectionNeedsSamples) {
  EXPECT_THROW((void)detect_cycle_length(Sp8(), 0), Error);
}
