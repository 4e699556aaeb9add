// Compiled with -mavx512f; only reached after a runtime CPU check. Elementwise
// kernels are shared with the AVX2 variant, only the GEMM micro-kernels widen.
#include <immintrin.h>

#include "packed_gemm.hpp"
#include "variants.hpp"

namespace uhinet::simd::avx512 {
namespace {

// 6 x 32 tile: two zmm columns per row.
inline void micro_6x32(std::size_t kc, const float* ap, std::ptrdiff_t rs, std::ptrdiff_t cs, const float* bp,
                       float* c, std::size_t ldc, bool add) {
  __m512 acc[6][2];
  for (auto& row : acc) {
    row[0] = _mm512_setzero_ps();
    row[1] = _mm512_setzero_ps();
  }
  for (std::size_t p = 0; p < kc; ++p) {
    const std::ptrdiff_t o = static_cast<std::ptrdiff_t>(p) * cs;
    const __m512 b0 = _mm512_loadu_ps(bp);
    const __m512 b1 = _mm512_loadu_ps(bp + 16);
#pragma GCC unroll 6
    for (int r = 0; r < 6; ++r) {
      const __m512 a = _mm512_set1_ps(ap[r * rs + o]);
      acc[r][0] = _mm512_fmadd_ps(a, b0, acc[r][0]);
      acc[r][1] = _mm512_fmadd_ps(a, b1, acc[r][1]);
    }
    bp += 32;
  }
  for (int r = 0; r < 6; ++r) {
    float* row = c + r * ldc;
    if (add) {
      _mm512_storeu_ps(row, _mm512_add_ps(_mm512_loadu_ps(row), acc[r][0]));
      _mm512_storeu_ps(row + 16, _mm512_add_ps(_mm512_loadu_ps(row + 16), acc[r][1]));
    } else {
      _mm512_storeu_ps(row, acc[r][0]);
      _mm512_storeu_ps(row + 16, acc[r][1]);
    }
  }
}

// 12 x 16 tile for narrow outputs (n <= 16), where a 32-wide tile would be half padding.
inline void micro_12x16(std::size_t kc, const float* ap, std::ptrdiff_t rs, std::ptrdiff_t cs, const float* bp,
                        float* c, std::size_t ldc, bool add) {
  __m512 acc[12];
  for (auto& r : acc) r = _mm512_setzero_ps();
  for (std::size_t p = 0; p < kc; ++p) {
    const std::ptrdiff_t o = static_cast<std::ptrdiff_t>(p) * cs;
    const __m512 b0 = _mm512_loadu_ps(bp);
#pragma GCC unroll 12
    for (int r = 0; r < 12; ++r) acc[r] = _mm512_fmadd_ps(_mm512_set1_ps(ap[r * rs + o]), b0, acc[r]);
    bp += 16;
  }
  for (int r = 0; r < 12; ++r) {
    float* row = c + r * ldc;
    if (add) {
      _mm512_storeu_ps(row, _mm512_add_ps(_mm512_loadu_ps(row), acc[r]));
    } else {
      _mm512_storeu_ps(row, acc[r]);
    }
  }
}

void gemm_f32(std::size_t m, std::size_t n, std::size_t k, MatrixRef<float> a, MatrixRef<float> b, float* c,
              std::size_t ldc, bool accumulate) {
  if (n <= 16) {
    detail::packed_gemm<12, 16>(m, n, k, a, b, c, ldc, accumulate, micro_12x16);
  } else {
    detail::packed_gemm<6, 32>(m, n, k, a, b, c, ldc, accumulate, micro_6x32);
  }
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t = [] {
    KernelTable k = avx2::table();
    k.gemm = gemm_f32;
    return k;
  }();
  return t;
}

}  // namespace uhinet::simd::avx512
