#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace rtann {

// 128-bit accumulator word. GCC/Clang builtin; wide enough for any
// supported operand format at vector lengths far beyond what the
// hardware model ever schedules.
using int128 = __int128;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

// Raw fixed-point storage: integer value scaled by 2^frac_bits.
using RawMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic>;
using RawVector = Eigen::Matrix<std::int32_t, Eigen::Dynamic, 1>;
using WideVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

}  // namespace rtann
