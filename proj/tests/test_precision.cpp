#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mpid/precision.hpp"
#include "mpid/random.hpp"
#include "oracles.hpp"

using namespace mpid;

namespace {

std::vector<double> sample_points(std::size_t count, std::uint64_t seed) {
  // Random sign, exponent in [-28, 17] and full 52-bit mantissa, covering the
  // binary16 subnormal, normal and overflow ranges.
  Rng rng(seed);
  std::vector<double> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t r = rng.next();
    const int e = -28 + static_cast<int>(rng.next() % 46);
    const double mant = 1.0 + static_cast<double>(r >> 12) * 0x1.0p-52;
    pts.push_back(((r & 1u) ? -1.0 : 1.0) * std::ldexp(mant, e));
  }
  return pts;
}

}  // namespace

TEST(FloatFormat, FieldsOfBuiltInFormats) {
  EXPECT_EQ(binary16.exponent_bits, 5);
  EXPECT_EQ(binary16.mantissa_bits, 10);
  EXPECT_EQ(binary32.exponent_bits, 8);
  EXPECT_EQ(binary32.mantissa_bits, 23);
  EXPECT_EQ(binary64.exponent_bits, 11);
  EXPECT_EQ(binary64.mantissa_bits, 52);
  EXPECT_EQ(binary16.e_min(), -14);
  EXPECT_EQ(binary16.e_max(), 15);
  EXPECT_EQ(binary32.e_min(), -126);
  EXPECT_EQ(binary64.e_max(), 1023);
}

TEST(FloatFormat, UnitRoundoffMatchesFormula) {
  EXPECT_EQ(binary16.unit_roundoff(), std::ldexp(1.0, -11));
  EXPECT_EQ(binary32.unit_roundoff(), std::ldexp(1.0, -24));
  EXPECT_EQ(binary64.unit_roundoff(), std::ldexp(1.0, -53));
  EXPECT_EQ(binary64.unit_roundoff(), std::numeric_limits<double>::epsilon() / 2);
}

TEST(FloatFormat, Limits) {
  EXPECT_EQ(binary16.max_finite(), 65504.0);
  EXPECT_EQ(binary16.min_subnormal(), std::ldexp(1.0, -24));
  EXPECT_EQ(binary32.max_finite(), static_cast<double>(std::numeric_limits<float>::max()));
  EXPECT_EQ(binary32.min_subnormal(), static_cast<double>(std::numeric_limits<float>::denorm_min()));
}

TEST(RoundScalar, SpecExamples) {
  EXPECT_EQ(round_scalar(1.0, binary16), 1.0);
  EXPECT_EQ(round_scalar(0.1, binary16), 0.0999755859375);
  EXPECT_EQ(oracle::to_half(0.1), 0.0999755859375);
  EXPECT_EQ(round_scalar(70000.0, binary16), std::numeric_limits<double>::infinity());
  EXPECT_EQ(round_scalar(-70000.0, binary16), -std::numeric_limits<double>::infinity());
}

TEST(RoundScalar, SpecialValues) {
  EXPECT_TRUE(std::isnan(round_scalar(std::nan(""), binary16)));
  EXPECT_EQ(round_scalar(INFINITY, binary32), INFINITY);
  EXPECT_EQ(round_scalar(-INFINITY, binary16), -INFINITY);
  EXPECT_TRUE(std::signbit(round_scalar(-0.0, binary16)));
  EXPECT_TRUE(std::signbit(round_scalar(-1e-30, binary16)));
  EXPECT_EQ(round_scalar(-1e-30, binary16), 0.0);
  // largest finite survives, the halfway point above it overflows (tie to even)
  EXPECT_EQ(round_scalar(65504.0, binary16), 65504.0);
  EXPECT_EQ(round_scalar(65519.99, binary16), 65504.0);
  EXPECT_EQ(round_scalar(65520.0, binary16), INFINITY);
}

TEST(RoundScalar, GradualUnderflow) {
  const double tiny = std::ldexp(1.0, -24);
  EXPECT_EQ(round_scalar(tiny, binary16), tiny);
  EXPECT_EQ(round_scalar(std::ldexp(1.0, -25), binary16), 0.0);  // tie to even
  EXPECT_EQ(round_scalar(std::ldexp(1.5, -25), binary16), tiny);
  EXPECT_EQ(round_scalar(std::ldexp(3.0, -25), binary16), 2 * tiny);  // tie 1.5 quanta -> 2
  EXPECT_EQ(round_scalar(std::ldexp(1.0, -149), binary32), std::ldexp(1.0, -149));
  // just below the smallest normal rounds up to it
  EXPECT_EQ(round_scalar(std::ldexp(1.0, -14) * (1 - 0x1.0p-30), binary16), std::ldexp(1.0, -14));
}

TEST(RoundScalar, Binary64IsIdentity) {
  for (double x : sample_points(10000, 7)) EXPECT_EQ(round_scalar(x, binary64), x);
  EXPECT_EQ(round_scalar(std::numeric_limits<double>::denorm_min(), binary64),
            std::numeric_limits<double>::denorm_min());
}

TEST(RoundScalar, AgreesWithBitLevelHalfOracle) {
  std::size_t mismatches = 0;
  for (double x : sample_points(200000, 11))
    if (std::bit_cast<std::uint64_t>(round_scalar(x, binary16)) !=
        std::bit_cast<std::uint64_t>(oracle::to_half(x)))
      ++mismatches;
  // every binary16 value and every midpoint between neighbours
  for (std::uint32_t h = 0; h < 0x7c00u; ++h) {
    const double a = oracle::half_bits_to_double(static_cast<std::uint16_t>(h));
    const double b = oracle::half_bits_to_double(static_cast<std::uint16_t>(h + 1));
    for (double x : {a, -a, (a + b) / 2, -(a + b) / 2})
      if (std::bit_cast<std::uint64_t>(round_scalar(x, binary16)) !=
          std::bit_cast<std::uint64_t>(oracle::to_half(x)))
        ++mismatches;
  }
  EXPECT_EQ(mismatches, 0u);
}

TEST(RoundScalar, AgreesWithHardwareFloatConversion) {
  Rng rng(5);
  std::size_t mismatches = 0;
  for (int i = 0; i < 200000; ++i) {
    const std::uint64_t r = rng.next();
    const int e = -160 + static_cast<int>(rng.next() % 300);
    const double x = ((r & 1u) ? -1.0 : 1.0) * std::ldexp(1.0 + static_cast<double>(r >> 12) * 0x1.0p-52, e);
    const double hw = static_cast<double>(static_cast<float>(x));
    if (std::bit_cast<std::uint64_t>(round_scalar(x, binary32)) != std::bit_cast<std::uint64_t>(hw))
      ++mismatches;
  }
  EXPECT_EQ(mismatches, 0u);
}

TEST(RoundScalar, Properties) {
  const FloatFormat formats[] = {binary16, binary32, binary64};
  const auto pts = sample_points(50000, 23);
  for (const FloatFormat& f : formats) {
    const double u = f.unit_roundoff();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double x = pts[i];
      const double r = round_scalar(x, f);
      EXPECT_EQ(round_scalar(r, f), r);               // idempotent
      EXPECT_EQ(round_scalar(-x, f), -r);             // sign symmetric
      if (std::abs(x) >= f.min_normal() && std::isfinite(r)) {
        EXPECT_LE(std::abs(r - x), std::abs(x) * u);  // |delta| <= u
      }
      if (i > 0) {
        const double y = pts[i - 1];
        const double ry = round_scalar(y, f);
        if (x <= y) EXPECT_LE(r, ry);                 // monotone
        else EXPECT_GE(r, ry);
      }
    }
  }
}

TEST(Gamma, Formula) {
  const double u = binary32.unit_roundoff();
  EXPECT_DOUBLE_EQ(gamma(1, u), u / (1 - u));
  EXPECT_NEAR(gamma(2, 6.0e-8), 1.20000007200000432e-7, 1e-22);  // 1.2e-7 * (1 + 6e-8 + ...)
  EXPECT_THROW(gamma(1000, 1e-3), DomainError);
  EXPECT_THROW(gamma(3000, binary16.unit_roundoff()), DomainError);
  EXPECT_THROW(gamma(0, u), DomainError);
}

TEST(PrecisionContext, Contracts) {
  const auto d = PrecisionContext::double_precision();
  const auto s = PrecisionContext::single_precision();
  const auto h = PrecisionContext::simulated_half();
  EXPECT_EQ(d.storage, binary64);
  EXPECT_EQ(d.accumulation, binary64);
  EXPECT_EQ(s.storage, binary32);
  EXPECT_EQ(s.accumulation, binary32);
  EXPECT_EQ(h.storage, binary16);
  EXPECT_EQ(h.accumulation, binary32);
  for (const auto& c : {d, s, h}) EXPECT_LE(c.accumulation.unit_roundoff(), c.storage.unit_roundoff());
}

TEST(CtxOp, Examples) {
  const auto d = PrecisionContext::double_precision();
  const auto s = PrecisionContext::single_precision();
  const auto h = PrecisionContext::simulated_half();
  EXPECT_EQ(ctx_op(Op::add, 1.0, 2.0, d), 3.0);
  EXPECT_EQ(ctx_op(Op::add, 1.0, std::ldexp(1.0, -24), s), 1.0);
  EXPECT_EQ(static_cast<double>(1.0f + 0x1.0p-24f), 1.0);
  EXPECT_EQ(ctx_store(std::ldexp(1.0, -25), h), 0.0);
  EXPECT_EQ(ctx_store(std::ldexp(1.0, -24), h), std::ldexp(1.0, -24));
  // accumulation in binary32 keeps what binary16 storage would lose
  EXPECT_EQ(ctx_op(Op::add, 1.0, std::ldexp(1.0, -12), h), 1.0 + std::ldexp(1.0, -12));
  EXPECT_EQ(ctx_store(1.0 + std::ldexp(1.0, -12), h), 1.0);
  EXPECT_EQ(ctx_op(Op::sqrt, 2.0, 0.0, s), static_cast<double>(std::sqrt(2.0f)));
}

TEST(CtxOp, DoubleContextIsNative) {
  const auto d = PrecisionContext::double_precision();
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.normal() * 1e3, y = rng.normal();
    EXPECT_EQ(ctx_op(Op::add, x, y, d), x + y);
    EXPECT_EQ(ctx_op(Op::sub, x, y, d), x - y);
    EXPECT_EQ(ctx_op(Op::mul, x, y, d), x * y);
    EXPECT_EQ(ctx_op(Op::div, x, y, d), x / y);
    EXPECT_EQ(ctx_op(Op::sqrt, std::abs(x), 0.0, d), std::sqrt(std::abs(x)));
  }
}

TEST(CtxOp, SingleContextMatchesFloatArithmetic) {
  const auto s = PrecisionContext::single_precision();
  Rng rng(4);
  for (int i = 0; i < 10000; ++i) {
    const float x = static_cast<float>(rng.normal() * 10), y = static_cast<float>(rng.normal());
    EXPECT_EQ(ctx_op(Op::add, x, y, s), static_cast<double>(x + y));
    EXPECT_EQ(ctx_op(Op::sub, x, y, s), static_cast<double>(x - y));
    EXPECT_EQ(ctx_op(Op::mul, x, y, s), static_cast<double>(x * y));
    EXPECT_EQ(ctx_op(Op::div, x, y, s), static_cast<double>(x / y));
  }
}
