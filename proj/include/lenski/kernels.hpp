#pragma once

// Reductions over family sizes used by the coalescence estimators.
//
// Each kernel has a scalar reference and an AVX2 variant. The active variant is
// picked once at startup from the CPU features; LENSKI_SIMD=scalar forces the
// reference path.

#include <cstdint>
#include <span>

namespace lenski {

enum class SimdLevel { Scalar, Avx2 };

/// Sum y, sum C(y,2), sum C(y,3) over family sizes y. All arithmetic is in
/// doubles on integer values, so results are exact while each sum stays below
/// 2^53 and the variants agree bit for bit.
struct FamilySums {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
};

FamilySums family_sums_scalar(std::span<const std::uint32_t> ys);
FamilySums family_sums_avx2(std::span<const std::uint32_t> ys);
FamilySums family_sums(std::span<const std::uint32_t> ys);

bool cpu_has_avx2();
SimdLevel active_simd_level();
const char* simd_level_name(SimdLevel level);

}  // namespace lenski
