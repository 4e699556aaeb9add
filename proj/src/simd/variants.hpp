#pragma once

#include "uhinet/simd/kernels.hpp"

namespace uhinet::simd {

namespace scalar {
const KernelTable& table();

template <typename T>
void gemm_reference(std::size_t m, std::size_t n, std::size_t k, MatrixRef<T> a, MatrixRef<T> b, T* c,
                    std::size_t ldc, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    T* row = c + i * ldc;
    if (!accumulate) {
      for (std::size_t j = 0; j < n; ++j) row[j] = T{0};
    }
    for (std::size_t p = 0; p < k; ++p) {
      const T aip = a(i, p);
      if (b.col_stride == 1) {
        const T* brow = b.data + static_cast<std::ptrdiff_t>(p) * b.row_stride;
        for (std::size_t j = 0; j < n; ++j) row[j] += aip * brow[j];
      } else {
        for (std::size_t j = 0; j < n; ++j) row[j] += aip * b(p, j);
      }
    }
  }
}
}  // namespace scalar

#if defined(UHINET_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

#if defined(UHINET_HAVE_AVX512)
namespace avx512 {
const KernelTable& table();
}
#endif

#if defined(UHINET_HAVE_NEON)
namespace neon {
const KernelTable& table();
}
#endif

}  // namespace uhinet::simd
