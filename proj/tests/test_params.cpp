#include <gtest/gtest.h>

#include "elastic/params.hpp"

using namespace elastic;

TEST(Params, InitParamsExamples) {
  const Sp16 sp16;
  auto p = init_params(24, sp16.spec());
  EXPECT_EQ(p.level, 1U);
  EXPECT_EQ(p.tail_bits, 8U);
  EXPECT_EQ(p.rounds, 6U);
  EXPECT_EQ(p.block_bits, 24U);

  p = init_params(32, sp16.spec());
  EXPECT_EQ(p.level, 1U);
  EXPECT_EQ(p.tail_bits, 16U);
  EXPECT_EQ(p.rounds, 8U);
  EXPECT_EQ(p.rounds, 2 * sp16.spec().cycles);

  p = init_params(33, sp16.spec());
  EXPECT_EQ(p.level, 2U);
  EXPECT_EQ(p.tail_bits, 1U);
  EXPECT_EQ(p.rounds, 5U);
  EXPECT_EQ(p.half_bits, 32U);
}

TEST(Params, LevelBoundaries) {
  const Sp16 sp16;
  EXPECT_EQ(init_params(17, sp16.spec()).level, 1U);
  EXPECT_EQ(init_params(64, sp16.spec()).level, 2U);
  EXPECT_EQ(init_params(64, sp16.spec()).tail_bits, 32U);
  EXPECT_EQ(init_params(65, sp16.spec()).level, 3U);
  EXPECT_EQ(init_params(128, sp16.spec()).level, 3U);
}

TEST(Params, RejectsLengthsUpToL) {
  const Sp16 sp16;
  for (std::size_t len : {0U, 1U, 8U, 16U}) {
    try {
      (void)init_params(len, sp16.spec());
      FAIL() << len;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::UnsupportedLength);
    }
  }
}

TEST(Params, KeyLengthExamples) {
  const Sp16 sp16;
  const auto p = init_params(24, sp16.spec());
  EXPECT_EQ(p.perm_key_bits, 5U);
  EXPECT_EQ(key_length(p, sp16.spec()), 202U);
  EXPECT_EQ(p.key_bits, 202U);

  const auto p0 = make_params(1, 0, sp16.spec());
  EXPECT_EQ(p0.rounds, 4U);
  EXPECT_EQ(p0.perm_key_bits, 4U);  // b = 16
  // {0 + 16} * 4 + 32 + 0 + K_perm
  EXPECT_EQ(p0.key_bits, 64U + 32U + 2 * p0.perm_key_bits);
}

TEST(Params, KeyLengthWithTenPermBitsIs106) {
  // The y = 0 example fixes K_perm = 10 (two 5-bit permutation keys).
  const Sp16 sp16;
  auto p = make_params(1, 0, sp16.spec());
  p.perm_key_bits = 5;
  EXPECT_EQ(key_length(p, sp16.spec()), 106U);
}

TEST(Params, CycleKeyBudgetClosedFormMatchesRecursion) {
  for (const CipherSpec& spec : {Sp16().spec(), Sp8().spec(), CipherSpec{"x3", 12, 3, 5, 7}}) {
    for (unsigned m = 0; m <= 4; ++m) {
      EXPECT_EQ(cycle_key_bits(spec, m), cycle_key_bits_closed_form(spec, m)) << m;
    }
  }
  EXPECT_EQ(cycle_key_bits(Sp16().spec(), 0), 16U);
  EXPECT_EQ(cycle_key_bits(Sp16().spec(), 1), 64U);
}

TEST(Params, RoundsAtLevelExamples) {
  const Sp16 sp16;
  const auto p = init_params(33, sp16.spec());  // n = 2, r = 5
  EXPECT_EQ(rounds_at_level(p, 2, sp16.spec()), 5U);
  EXPECT_EQ(rounds_at_level(p, 1, sp16.spec()), 10U);
  EXPECT_EQ(rounds_at_level(p, 0, sp16.spec()), 10U);
  const auto p1 = init_params(24, sp16.spec());
  EXPECT_EQ(rounds_at_level(p1, 1, sp16.spec()), p1.rounds);
  EXPECT_THROW((void)rounds_at_level(p, 3, sp16.spec()), Error);
}

TEST(Params, ParamInvariantsOverGrid) {
  for (const CipherSpec& spec : {Sp16().spec(), Sp8().spec()}) {
    for (std::size_t len = spec.block_bits + 1; len <= 40 * spec.block_bits; ++len) {
      const auto p = init_params(len, spec);
      const std::size_t half = (std::size_t{1} << (p.level - 1)) * spec.block_bits;
      ASSERT_EQ(p.half_bits, half);
      ASSERT_LE(p.tail_bits, half);
      ASSERT_GE(p.tail_bits, 1U);
      ASSERT_EQ(p.block_bits, len);
      ASSERT_LE(p.rounds, 2 * spec.cycles);
      ASSERT_GT(p.rounds, spec.cycles);
    }
  }
}

TEST(Params, MakeParamsValidates) {
  const Sp8 sp8;
  EXPECT_THROW((void)make_params(0, 0, sp8.spec()), Error);
  EXPECT_THROW((void)make_params(1, 9, sp8.spec()), Error);
  EXPECT_NO_THROW((void)make_params(2, 16, sp8.spec()));
  EXPECT_THROW((void)with_rounds(make_params(1, 2, sp8.spec()), 0, sp8.spec()), Error);
  const auto reduced = with_rounds(make_params(1, 2, sp8.spec()), 1, sp8.spec());
  EXPECT_EQ(reduced.rounds, 1U);
  EXPECT_EQ(reduced.key_bits, (2U + 8U) + 16U + 4U + 2 * reduced.perm_key_bits);
}
