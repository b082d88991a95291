#include "rtann/fixed_point.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rtann {

void FixedFormat::require_valid() const {
  if (!valid()) {
    std::ostringstream os;
    os << "invalid fixed-point format Q(" << total_bits << "," << frac_bits
       << "): need 2 <= total_bits <= 32 and 0 <= frac_bits < total_bits";
    throw std::invalid_argument(os.str());
  }
}

QuantizeResult quantize(double v, FixedFormat fmt) {
  fmt.require_valid();
  QuantizeResult out;
  out.value.fmt = fmt;
  if (std::isnan(v)) {
    out.value.raw = 0;
    out.saturated = true;
    return out;
  }
  const double scaled = v * static_cast<double>(fmt.scale());
  // llround: round to nearest, ties away from zero, independent of the
  // FP environment. Guard its domain against overflow first.
  long long r;
  if (scaled >= 9.0e18) {
    r = std::numeric_limits<long long>::max();
  } else if (scaled <= -9.0e18) {
    r = std::numeric_limits<long long>::min();
  } else {
    r = std::llround(scaled);
  }
  if (r > fmt.max_raw()) {
    out.value.raw = fmt.max_raw();
    out.saturated = true;
  } else if (r < fmt.min_raw()) {
    out.value.raw = fmt.min_raw();
    out.saturated = true;
  } else {
    out.value.raw = static_cast<std::int32_t>(r);
  }
  return out;
}

Fixed fixed_from_raw(std::int64_t raw, FixedFormat fmt) {
  fmt.require_valid();
  if (raw > fmt.max_raw()) raw = fmt.max_raw();
  if (raw < fmt.min_raw()) raw = fmt.min_raw();
  return Fixed{static_cast<std::int32_t>(raw), fmt};
}

Accumulator fixed_mac(std::span<const Fixed> inputs, std::span<const Fixed> weights,
                      Fixed bias) {
  if (inputs.size() != weights.size() || inputs.empty()) {
    std::ostringstream os;
    os << "fixed_mac: inputs (" << inputs.size() << ") and weights ("
       << weights.size() << ") must have equal length >= 1";
    throw std::invalid_argument(os.str());
  }
  const FixedFormat fmt = bias.fmt;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!(inputs[i].fmt == fmt) || !(weights[i].fmt == fmt)) {
      throw std::invalid_argument("fixed_mac: all operands must share one format");
    }
  }
  int128 acc = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    acc += static_cast<int128>(static_cast<std::int64_t>(inputs[i].raw) *
                               static_cast<std::int64_t>(weights[i].raw));
  }
  acc += static_cast<int128>(bias.raw) << fmt.frac_bits;
  return Accumulator{acc, fmt};
}

Accumulator mac_raw(const Eigen::Ref<const RawVector>& x,
                    const Eigen::Ref<const RawVector>& w, std::int32_t bias_raw,
                    FixedFormat fmt) {
  if (x.size() != w.size() || x.size() == 0) {
    std::ostringstream os;
    os << "mac_raw: inputs (" << x.size() << ") and weights (" << w.size()
       << ") must have equal length >= 1";
    throw std::invalid_argument(os.str());
  }
  int128 acc = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    acc += static_cast<int128>(static_cast<std::int64_t>(x[i]) *
                               static_cast<std::int64_t>(w[i]));
  }
  acc += static_cast<int128>(bias_raw) << fmt.frac_bits;
  return Accumulator{acc, fmt};
}

Fixed narrow(const Accumulator& acc, bool* saturated) {
  const FixedFormat fmt = acc.fmt;
  const int f = fmt.frac_bits;
  int128 q;
  if (f == 0) {
    q = acc.raw;
  } else {
    const int128 half = int128{1} << (f - 1);
    const int128 scale = int128{1} << f;
    // Integer division truncates toward zero, so offsetting by half
    // the scale rounds half away from zero.
    q = acc.raw >= 0 ? (acc.raw + half) / scale : (acc.raw - half) / scale;
  }
  bool sat = false;
  std::int32_t raw;
  if (q > static_cast<int128>(fmt.max_raw())) {
    raw = fmt.max_raw();
    sat = true;
  } else if (q < static_cast<int128>(fmt.min_raw())) {
    raw = fmt.min_raw();
    sat = true;
  } else {
    raw = static_cast<std::int32_t>(q);
  }
  if (saturated) *saturated = sat;
  return Fixed{raw, fmt};
}

MatrixQuantizeResult quantize_matrix(const Eigen::Ref<const Matrix>& m, FixedFormat fmt) {
  MatrixQuantizeResult out;
  out.raw.resize(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const QuantizeResult q = quantize(m(r, c), fmt);
      out.raw(r, c) = q.value.raw;
      out.saturations += q.saturated ? 1 : 0;
    }
  }
  return out;
}

VectorQuantizeResult quantize_vector(const Eigen::Ref<const Vector>& v, FixedFormat fmt) {
  VectorQuantizeResult out;
  out.raw.resize(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const QuantizeResult q = quantize(v[i], fmt);
    out.raw[i] = q.value.raw;
    out.saturations += q.saturated ? 1 : 0;
  }
  return out;
}

Matrix dequantize_matrix(const Eigen::Ref<const RawMatrix>& raw, FixedFormat fmt) {
  return raw.cast<double>() / static_cast<double>(fmt.scale());
}

}  // namespace rtann
