#include <gtest/gtest.h>

#include <random>
#include <set>

#include "elastic/engine.hpp"

using namespace elastic;

namespace {

BitString random_bits(std::mt19937_64& rng, std::size_t n) {
  BitString s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.set(i, (rng() & 1U) != 0);
  }
  return s;
}

const MasterKey kVectorKey = MasterKey::from_hex("0102030405");

}  // namespace

TEST(Engine, LevelZeroCycleIsOneSp16Round) {
  const Sp16 sp16;
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_bits(rng, 16);
    const auto k = random_bits(rng, 16);
    KeyCursor cur(k);
    EXPECT_EQ(cycle_function(sp16, s, 0, cur), sp16.forward(s, k));
    EXPECT_EQ(cur.remaining(), 0U);
  }
}

TEST(Engine, LevelOneZeroKeyHandTrace) {
  // f = zero-key SP16 round. Iteration 1: (f(A) ^ B, f(A)).
  // Iteration 2: A' = f(f(A) ^ B), B' = f(A): result (A' ^ f(A), A').
  const Sp16 sp16;
  const BitString zero16(16);
  auto f = [&](const BitString& v) { return sp16.forward(v, zero16); };
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_bits(rng, 16);
    const auto b = random_bits(rng, 16);
    const BitString keys(cycle_key_bits(sp16.spec(), 1));
    KeyCursor cur(keys);
    const auto out = cycle_function(sp16, a.concat(b), 1, cur);
    const auto a1 = f(a) ^ b;
    const auto b1 = f(a);
    const auto a2 = f(a1);
    EXPECT_EQ(out, (a2 ^ b1).concat(a2));
  }
}

TEST(Engine, CycleConsumesBudget) {
  const Sp16 sp16;
  for (unsigned m = 0; m <= 2; ++m) {
    const std::size_t g = cycle_key_bits_closed_form(sp16.spec(), m);
    const BitString keys(g + 7);
    KeyCursor cur(keys);
    EngineTrace trace;
    (void)cycle_function(sp16, BitString((std::size_t{1} << m) * 16), m, cur, &trace);
    EXPECT_EQ(cur.consumed(), g) << m;
    EXPECT_EQ(trace.base_rounds, std::size_t{1} << m);
  }
}

TEST(Engine, CycleKeyUnderrun) {
  const Sp16 sp16;
  const BitString keys(63);
  KeyCursor cur(keys);
  try {
    (void)cycle_function(sp16, BitString(32), 1, cur);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::KeyUnderrun);
  }
}

TEST(Engine, CycleInverseLevelZeroExhaustiveSp8) {
  const Sp8 sp8;
  std::mt19937_64 rng(3);
  for (int key = 0; key < 32; ++key) {
    const auto k = random_bits(rng, 8);
    for (std::uint64_t v = 0; v < 256; ++v) {
      const auto s = BitString::from_uint(v, 8);
      KeyCursor fwd(k);
      const auto c = cycle_function(sp8, s, 0, fwd);
      ReverseKeyCursor rev(k);
      ASSERT_EQ(cycle_function_inv(sp8, c, 0, rev), s);
      ASSERT_EQ(rev.remaining(), 0U);
    }
  }
}

TEST(Engine, CycleInverseLevelOneSp8) {
  const Sp8 sp8;
  std::mt19937_64 rng(4);
  const std::size_t g = cycle_key_bits(sp8.spec(), 1);
  for (int t = 0; t < 10000; ++t) {
    const auto k = random_bits(rng, g);
    const auto s = random_bits(rng, 16);
    KeyCursor fwd(k);
    const auto c = cycle_function(sp8, s, 1, fwd);
    ReverseKeyCursor rev(k);
    ASSERT_EQ(cycle_function_inv(sp8, c, 1, rev), s);
  }
}

TEST(Engine, CycleInverseLevelTwoSp16) {
  const Sp16 sp16;
  std::mt19937_64 rng(5);
  const std::size_t g = cycle_key_bits(sp16.spec(), 2);
  for (int t = 0; t < 1000; ++t) {
    const auto k = random_bits(rng, g);
    const auto s = random_bits(rng, 64);
    KeyCursor fwd(k);
    const auto c = cycle_function(sp16, s, 2, fwd);
    ReverseKeyCursor rev(k);
    ASSERT_EQ(cycle_function_inv(sp16, c, 2, rev), s);
  }
}

TEST(Engine, KeyDependentPermutation) {
  std::mt19937_64 rng(6);
  const auto s = random_bits(rng, 24);
  EXPECT_EQ(key_dependent_permutation(s, BitString(5), Direction::Forward), s);
  EXPECT_EQ(key_dependent_permutation(s, BitString::from_uint(24, 5), Direction::Forward), s);
  EXPECT_EQ(key_dependent_permutation(s, BitString::from_uint(3, 5), Direction::Forward),
            rotate(s, 3));
  for (int t = 0; t < 100; ++t) {
    const auto k = random_bits(rng, 5);
    const auto fwd = key_dependent_permutation(s, k, Direction::Forward);
    EXPECT_EQ(key_dependent_permutation(fwd, k, Direction::Inverse), s);
  }
}

// Frozen with tests/oracles/elastic_ref.py (straight-line reference).
TEST(Engine, FrozenVectors) {
  struct Vector {
    std::size_t bits;
    const char* cipher_hex;
  };
  const Sp16 sp16;
  for (const Vector v : {Vector{24, "385221"}, Vector{40, "5e796bc3de"}}) {
    const auto c = ElasticCipher<Sp16>::for_length(sp16, v.bits, kVectorKey);
    const auto ct = c.encrypt(BitString(v.bits));
    EXPECT_EQ(ct, BitString::from_hex(v.cipher_hex, v.bits));
    EXPECT_EQ(c.decrypt(ct), BitString(v.bits));
  }
  const auto c8 = ElasticCipher<Sp8>::for_length(Sp8(), 10, kVectorKey);
  EXPECT_EQ(c8.params().key_bits, 58U);
  EXPECT_EQ(c8.encrypt(BitString(10)), BitString::from_hex("c78", 10));
}

TEST(Engine, RoundTripAllLengthsSp16) {
  const Sp16 sp16;
  std::mt19937_64 rng(7);
  for (std::size_t len = 17; len <= 128; ++len) {
    for (int k = 0; k < 3; ++k) {
      std::vector<std::uint8_t> mk(1 + rng() % 16);
      for (auto& b : mk) {
        b = static_cast<std::uint8_t>(rng());
      }
      const auto c = ElasticCipher<Sp16>::for_length(sp16, len, MasterKey(mk));
      const auto pt = random_bits(rng, len);
      const auto ct = c.encrypt(pt);
      ASSERT_EQ(ct.size(), len);
      ASSERT_EQ(c.decrypt(ct), pt) << len;
    }
  }
}

TEST(Engine, TailFreeReducesToWrappedCycles) {
  const Sp16 sp16;
  const auto p = make_params(1, 0, sp16.spec());
  const auto key = ExpandedKey::derive(kVectorKey, p, sp16.spec());
  const BitString& k = key.material();
  std::mt19937_64 rng(8);
  const auto pt = random_bits(rng, 16);
  // whiten, rotate, c0 plain SP16 rounds, rotate, whiten
  BitString s = pt ^ k.slice(0, 16);
  s = rotate(s, static_cast<std::int64_t>(k.slice(16, 20).to_uint()));
  std::size_t at = 20;
  for (std::size_t r = 0; r < 4; ++r, at += 16) {
    s = sp16.forward(s, k.slice(at, at + 16));
  }
  s = rotate(s, static_cast<std::int64_t>(k.slice(at, at + 4).to_uint()));
  at += 4;
  s = s ^ k.slice(at, at + 16);
  EXPECT_EQ(encrypt(sp16, pt, key, p), s);
  EXPECT_EQ(decrypt(sp16, s, key, p), pt);
}

TEST(Engine, SingleBitChangesCiphertext) {
  const Sp16 sp16;
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t len = 17 + rng() % 48;
    const auto c = ElasticCipher<Sp16>::for_length(sp16, len, kVectorKey);
    auto a = random_bits(rng, len);
    auto b = a;
    b.flip(rng() % len);
    ASSERT_NE(c.encrypt(a), c.encrypt(b));
  }
}

TEST(Engine, CorruptedCiphertextDoesNotDecryptToOriginal) {
  const Sp16 sp16;
  std::mt19937_64 rng(10);
  const auto c = ElasticCipher<Sp16>::for_length(sp16, 24, kVectorKey);
  const BitString zero(24);
  const auto ct = c.encrypt(zero);
  for (std::size_t bit = 0; bit < 24; ++bit) {
    auto bad = ct;
    bad.flip(bit);
    EXPECT_NE(c.decrypt(bad), zero);
  }
}

TEST(Engine, KeyAndInvocationAccounting) {
  const Sp16 sp16;
  const Sp8 sp8;
  auto check = [](const auto& round, std::size_t len) {
    const auto spec = round.spec();
    const auto p = init_params(len, spec);
    const auto key = ExpandedKey::derive(kVectorKey, p, spec);
    EngineTrace trace;
    (void)encrypt(round, BitString(len), key, p, &trace);
    ASSERT_EQ(trace.key_bits, key_length(p, spec)) << len;
    ASSERT_EQ(trace.elastic_rounds, p.rounds);
    ASSERT_EQ(trace.base_rounds, rounds_at_level(p, 0, spec));
    for (unsigned m = 1; m <= p.level; ++m) {
      // a level-m round of E_n is one call of the level-(m-1) cycle
      ASSERT_EQ(trace.calls_at(m - 1), rounds_at_level(p, m, spec)) << len << " m=" << m;
    }
  };
  for (std::size_t len = 17; len <= 128; ++len) {
    check(sp16, len);
  }
  for (std::size_t len = 9; len <= 70; ++len) {
    check(sp8, len);
  }
}

TEST(Engine, Sp8LevelOneTenBitsIsPermutation) {
  const Sp8 sp8;
  for (const char* hex : {"0102030405", "ff", "a5a5a5"}) {
    const auto c = ElasticCipher<Sp8>::for_length(sp8, 10, MasterKey::from_hex(hex));
    std::set<std::uint64_t> images;
    for (std::uint64_t v = 0; v < 1024; ++v) {
      const auto ct = c.encrypt(BitString::from_uint(v, 10));
      images.insert(ct.to_uint());
      ASSERT_EQ(c.decrypt(ct).to_uint(), v);
    }
    EXPECT_EQ(images.size(), 1024U);
  }
}

TEST(Engine, MaximalTailWrapsWholeLeftPart) {
  // y = 2^(n-1) L: the swap window covers the entire left part and wraps.
  const Sp8 sp8;
  std::mt19937_64 rng(11);
  for (std::size_t len : {16U, 32U, 64U}) {
    const auto c = ElasticCipher<Sp8>::for_length(sp8, len, kVectorKey);
    ASSERT_EQ(c.params().tail_bits, c.params().half_bits);
    for (int t = 0; t < 50; ++t) {
      const auto pt = random_bits(rng, len);
      ASSERT_EQ(c.decrypt(c.encrypt(pt)), pt);
    }
  }
}

TEST(Engine, MismatchedInputsThrow) {
  const Sp16 sp16;
  const auto p = init_params(24, sp16.spec());
  const auto key = ExpandedKey::derive(kVectorKey, p, sp16.spec());
  EXPECT_THROW((void)encrypt(sp16, BitString(23), key, p), Error);
  const auto other = ExpandedKey::derive(kVectorKey, init_params(25, sp16.spec()), sp16.spec());
  try {
    (void)encrypt(sp16, BitString(24), other, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::KeyMismatch);
  }
  EXPECT_THROW((void)decrypt(sp16, BitString(24), other, p), Error);
}
