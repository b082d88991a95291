#pragma once

#include <cstdint>
#include <span>

#include "rtann/types.hpp"

namespace rtann {

// Signed two's-complement fixed-point format: total_bits wide,
// frac_bits of fraction. Raw values live in
// [-2^(total_bits-1), 2^(total_bits-1) - 1].
struct FixedFormat {
  int total_bits = 16;
  int frac_bits = 8;

  constexpr bool valid() const {
    return total_bits >= 2 && total_bits <= 32 && frac_bits >= 0 &&
           frac_bits < total_bits;
  }
  void require_valid() const;

  constexpr std::int64_t scale() const { return std::int64_t{1} << frac_bits; }
  constexpr std::int32_t max_raw() const {
    return static_cast<std::int32_t>((std::int64_t{1} << (total_bits - 1)) - 1);
  }
  constexpr std::int32_t min_raw() const {
    return static_cast<std::int32_t>(-(std::int64_t{1} << (total_bits - 1)));
  }
  constexpr double resolution() const { return 1.0 / static_cast<double>(scale()); }
  double max_value() const { return static_cast<double>(max_raw()) / static_cast<double>(scale()); }
  double min_value() const { return static_cast<double>(min_raw()) / static_cast<double>(scale()); }

  friend constexpr bool operator==(const FixedFormat& a, const FixedFormat& b) {
    return a.total_bits == b.total_bits && a.frac_bits == b.frac_bits;
  }
};

// One quantized value: raw = value * 2^frac_bits, saturated to the format.
struct Fixed {
  std::int32_t raw = 0;
  FixedFormat fmt{};

  double value() const { return static_cast<double>(raw) / static_cast<double>(fmt.scale()); }
};

// MAC accumulator at 2*frac_bits scale. 128 bits of headroom: never
// overflows for any valid format at vector lengths <= 2^60.
struct Accumulator {
  int128 raw = 0;
  FixedFormat fmt{};

  double value() const {
    return static_cast<double>(raw) /
           (static_cast<double>(fmt.scale()) * static_cast<double>(fmt.scale()));
  }
};

struct QuantizeResult {
  Fixed value;
  bool saturated = false;
};

// Round half away from zero, then saturate. Saturation is flagged,
// never fatal (hardware clips silently). Non-finite inputs clip to the
// nearest representable bound (NaN maps to zero, flagged).
QuantizeResult quantize(double v, FixedFormat fmt);

inline double dequantize(Fixed v) { return v.value(); }

// Construct from a raw integer; clips to the format range.
Fixed fixed_from_raw(std::int64_t raw, FixedFormat fmt);

// s = sum(x_i * w_i) + b, exact integer arithmetic, no intermediate
// rounding. Operands must share one format; the bias is pre-shifted to
// the product scale.
Accumulator fixed_mac(std::span<const Fixed> inputs, std::span<const Fixed> weights,
                      Fixed bias);

// Same MAC over raw storage (the engine's path). Identical results.
Accumulator mac_raw(const Eigen::Ref<const RawVector>& x,
                    const Eigen::Ref<const RawVector>& w, std::int32_t bias_raw,
                    FixedFormat fmt);

// Requantize an accumulator back to the operand format: shift right by
// frac_bits with round-half-away-from-zero, saturate.
Fixed narrow(const Accumulator& acc, bool* saturated = nullptr);

// ReLU as the hardware does it: comparator output drives a 2:1 select
// between s and zero.
inline Fixed relu(Fixed s) {
  const bool positive = s.raw > 0;
  return Fixed{positive ? s.raw : 0, s.fmt};
}

struct MatrixQuantizeResult {
  RawMatrix raw;
  int saturations = 0;
};

struct VectorQuantizeResult {
  RawVector raw;
  int saturations = 0;
};

MatrixQuantizeResult quantize_matrix(const Eigen::Ref<const Matrix>& m, FixedFormat fmt);
VectorQuantizeResult quantize_vector(const Eigen::Ref<const Vector>& v, FixedFormat fmt);

Matrix dequantize_matrix(const Eigen::Ref<const RawMatrix>& raw, FixedFormat fmt);

}  // namespace rtann
