#include "lenski/kernels.hpp"

#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define LENSKI_X86 1
#endif

namespace lenski {

FamilySums family_sums_scalar(std::span<const std::uint32_t> ys) {
  FamilySums s;
  for (std::uint32_t v : ys) {
    const double y = static_cast<double>(v);
    const double p2 = y * (y - 1.0);
    s.s1 += y;
    s.s2 += p2 * 0.5;
    s.s3 += p2 * (y - 2.0) / 6.0;
  }
  return s;
}

#ifdef LENSKI_X86

__attribute__((target("avx2"))) FamilySums family_sums_avx2(std::span<const std::uint32_t> ys) {
  const std::size_t n = ys.size();
  const std::uint32_t* p = ys.data();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d sixth_div = _mm256_set1_pd(6.0);
  __m256d a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd();
  __m256d a3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // Family sizes are far below 2^31, so the signed conversion is exact.
    const __m128i v = _mm_loadu_si128(reinterpret_cast<const __m128i*>(p + i));
    const __m256d y = _mm256_cvtepi32_pd(v);
    const __m256d p2 = _mm256_mul_pd(y, _mm256_sub_pd(y, one));
    a1 = _mm256_add_pd(a1, y);
    a2 = _mm256_add_pd(a2, _mm256_mul_pd(p2, half));
    a3 = _mm256_add_pd(a3, _mm256_div_pd(_mm256_mul_pd(p2, _mm256_sub_pd(y, two)), sixth_div));
  }
  alignas(32) double b1[4], b2[4], b3[4];
  _mm256_store_pd(b1, a1);
  _mm256_store_pd(b2, a2);
  _mm256_store_pd(b3, a3);
  FamilySums tail = family_sums_scalar(ys.subspan(i));
  FamilySums s;
  s.s1 = (b1[0] + b1[1]) + (b1[2] + b1[3]) + tail.s1;
  s.s2 = (b2[0] + b2[1]) + (b2[2] + b2[3]) + tail.s2;
  s.s3 = (b3[0] + b3[1]) + (b3[2] + b3[3]) + tail.s3;
  return s;
}

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
}

#else

FamilySums family_sums_avx2(std::span<const std::uint32_t> ys) { return family_sums_scalar(ys); }

bool cpu_has_avx2() { return false; }

#endif

SimdLevel active_simd_level() {
  static const SimdLevel level = [] {
    const char* env = std::getenv("LENSKI_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return SimdLevel::Scalar;
    return cpu_has_avx2() ? SimdLevel::Avx2 : SimdLevel::Scalar;
  }();
  return level;
}

const char* simd_level_name(SimdLevel level) {
  return level == SimdLevel::Avx2 ? "avx2" : "scalar";
}

FamilySums family_sums(std::span<const std::uint32_t> ys) {
  return active_simd_level() == SimdLevel::Avx2 ? family_sums_avx2(ys) : family_sums_scalar(ys);
}

}  // namespace lenski
