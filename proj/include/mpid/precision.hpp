#pragma once
//
// Emulated IEEE-754 binary16/binary32/binary64 rounding.
//
// Every value is held in a 64-bit double; a narrower format is imposed by
// rounding through round_scalar(). A PrecisionContext pairs a storage format
// (what matrices and vectors are written back in) with an accumulation format
// (what every arithmetic result is rounded to).
//

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "mpid/errors.hpp"

namespace mpid {

struct FloatFormat {
  int base = 2;
  int exponent_bits = 11;
  int mantissa_bits = 52;  // stored bits, precision t = mantissa_bits + 1

  constexpr int precision() const noexcept { return mantissa_bits + 1; }
  constexpr int bias() const noexcept { return (1 << (exponent_bits - 1)) - 1; }
  constexpr int e_min() const noexcept { return 1 - bias(); }
  constexpr int e_max() const noexcept { return bias(); }

  // u = (1/2) b^(1-t)
  double unit_roundoff() const noexcept { return std::ldexp(1.0, -precision()); }

  double max_finite() const noexcept {
    return std::ldexp(2.0 - std::ldexp(1.0, -mantissa_bits), e_max());
  }
  double min_normal() const noexcept { return std::ldexp(1.0, e_min()); }
  double min_subnormal() const noexcept { return std::ldexp(1.0, e_min() - mantissa_bits); }

  constexpr bool is_binary64() const noexcept {
    return exponent_bits >= 11 && mantissa_bits >= 52;
  }

  friend constexpr bool operator==(const FloatFormat&, const FloatFormat&) = default;
};

inline constexpr FloatFormat binary16{2, 5, 10};
inline constexpr FloatFormat binary32{2, 8, 23};
inline constexpr FloatFormat binary64{2, 11, 52};

// Round-to-nearest, ties-to-even into format f, with gradual underflow.
// Magnitudes past the largest finite value become +-Inf, magnitudes below
// half the smallest subnormal become +-0, NaN stays NaN.
inline double round_scalar(double x, const FloatFormat& f) noexcept {
  if (f.is_binary64() || !std::isfinite(x)) return x;

  const auto bits = std::bit_cast<std::uint64_t>(x);
  const std::uint64_t sign = bits & (std::uint64_t{1} << 63);
  const std::uint64_t mag = bits & ~sign;
  if (mag == 0) return x;

  constexpr std::uint64_t frac_mask = (std::uint64_t{1} << 52) - 1;
  const int biased = static_cast<int>(mag >> 52);

  // value = sig * 2^lsb_exp, binade exponent = exp
  std::uint64_t sig;
  int lsb_exp;
  int exp;
  if (biased == 0) {
    sig = mag & frac_mask;
    lsb_exp = -1074;
    exp = -1023;
  } else {
    sig = (mag & frac_mask) | (std::uint64_t{1} << 52);
    lsb_exp = biased - 1075;
    exp = biased - 1023;
  }

  double r;
  if (exp >= f.e_min()) {
    // normal range of f: round the double's own bit pattern, letting a carry
    // ripple into the exponent field
    const int shift = 52 - f.mantissa_bits;
    const std::uint64_t lsb = std::uint64_t{1} << shift;
    std::uint64_t rb = mag + (lsb / 2 - 1) + ((mag >> shift) & 1u);
    rb &= ~(lsb - 1);
    const std::uint64_t max_bits =
        (static_cast<std::uint64_t>(f.e_max() + 1023) << 52) | (frac_mask & ~(lsb - 1));
    r = rb > max_bits ? std::numeric_limits<double>::infinity() : std::bit_cast<double>(rb);
  } else {
    // subnormal range of f: fixed quantum 2^(e_min - mantissa_bits)
    const int quantum_exp = f.e_min() - f.mantissa_bits;
    const int shift = quantum_exp - lsb_exp;
    if (shift > 54) {
      r = 0.0;
    } else {
      std::uint64_t q = sig >> shift;
      const std::uint64_t rem = sig & ((std::uint64_t{1} << shift) - 1);
      const std::uint64_t half = std::uint64_t{1} << (shift - 1);
      if (rem > half || (rem == half && (q & 1u))) ++q;
      r = std::ldexp(static_cast<double>(q), quantum_exp);
    }
  }
  return sign ? -r : r;
}

// gamma_k = k u / (1 - u), the bound on the relative error accumulated over
// k successive rounded operations. Requires k u < 1.
inline double gamma(long long k, double u) {
  if (k < 1) throw DomainError("gamma: k must be positive");
  const double ku = static_cast<double>(k) * u;
  if (!(ku < 1.0)) throw DomainError("gamma: k*u >= 1");
  return ku / (1.0 - u);
}

enum class PrecisionKind { Double, Single, SimulatedHalf };

struct PrecisionContext {
  FloatFormat storage = binary64;
  FloatFormat accumulation = binary64;
  PrecisionKind kind = PrecisionKind::Double;

  static constexpr PrecisionContext double_precision() noexcept {
    return {binary64, binary64, PrecisionKind::Double};
  }
  static constexpr PrecisionContext single_precision() noexcept {
    return {binary32, binary32, PrecisionKind::Single};
  }
  // binary16 storage, binary32 arithmetic
  static constexpr PrecisionContext simulated_half() noexcept {
    return {binary16, binary32, PrecisionKind::SimulatedHalf};
  }

  static constexpr PrecisionContext of(PrecisionKind k) noexcept {
    switch (k) {
      case PrecisionKind::Single: return single_precision();
      case PrecisionKind::SimulatedHalf: return simulated_half();
      case PrecisionKind::Double: break;
    }
    return double_precision();
  }

  constexpr bool is_double() const noexcept { return kind == PrecisionKind::Double; }

  friend constexpr bool operator==(const PrecisionContext&, const PrecisionContext&) = default;
};

inline std::string_view name(PrecisionKind k) noexcept {
  switch (k) {
    case PrecisionKind::Double: return "double";
    case PrecisionKind::Single: return "single";
    case PrecisionKind::SimulatedHalf: return "half";
  }
  return "?";
}

enum class Op { add, sub, mul, div, sqrt };

// Exact operation, then one rounding into the accumulation format. The exact
// result of +,-,*,/,sqrt on binary32 operands is first rounded to binary64;
// 53 >= 2*24+2, so the double rounding is innocuous.
inline double ctx_op(Op op, double x, double y, const PrecisionContext& ctx) noexcept {
  double r;
  switch (op) {
    case Op::add: r = x + y; break;
    case Op::sub: r = x - y; break;
    case Op::mul: r = x * y; break;
    case Op::div: r = x / y; break;
    case Op::sqrt: r = std::sqrt(x); break;
    default: r = std::numeric_limits<double>::quiet_NaN();
  }
  return round_scalar(r, ctx.accumulation);
}

inline double ctx_store(double x, const PrecisionContext& ctx) noexcept {
  return round_scalar(x, ctx.storage);
}

}  // namespace mpid
