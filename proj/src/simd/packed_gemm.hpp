#pragma once

// Goto-style blocked GEMM driver shared by the vector variants. Operands are
// copied into contiguous MR-row and NR-column panels; the ISA-specific
// micro-kernel then only ever sees unit-stride memory. Each output element is
// summed over k in ascending order, block by block.

#include <algorithm>
#include <cstring>
#include <vector>

#include "uhinet/simd/kernels.hpp"

namespace uhinet::simd::detail {

inline constexpr std::size_t kBlockK = 256;
inline constexpr std::size_t kBlockM = 120;
inline constexpr std::size_t kBlockN = 2048;

template <std::size_t MR>
void pack_a(const MatrixRef<float>& a, std::size_t i0, std::size_t rows, std::size_t p0, std::size_t kc,
            float* out) {
  for (std::size_t ir = 0; ir < rows; ir += MR) {
    const std::size_t mr = std::min(MR, rows - ir);
    for (std::size_t p = 0; p < kc; ++p) {
      for (std::size_t r = 0; r < mr; ++r) out[p * MR + r] = a(i0 + ir + r, p0 + p);
      for (std::size_t r = mr; r < MR; ++r) out[p * MR + r] = 0.0f;
    }
    out += kc * MR;
  }
}

template <std::size_t NR>
void pack_b(const MatrixRef<float>& b, std::size_t p0, std::size_t kc, std::size_t j0, std::size_t cols,
            float* out) {
  for (std::size_t jr = 0; jr < cols; jr += NR) {
    const std::size_t nr = std::min(NR, cols - jr);
    for (std::size_t p = 0; p < kc; ++p) {
      float* dst = out + p * NR;
      if (b.col_stride == 1 && nr == NR) {
        std::memcpy(dst, &b(p0 + p, j0 + jr), NR * sizeof(float));
      } else {
        for (std::size_t c = 0; c < nr; ++c) dst[c] = b(p0 + p, j0 + jr + c);
        for (std::size_t c = nr; c < NR; ++c) dst[c] = 0.0f;
      }
    }
    out += kc * NR;
  }
}

// Micro: void(std::size_t kc, const float* a, std::ptrdiff_t a_row, std::ptrdiff_t a_col,
//             const float* b_panel, float* c, std::size_t ldc, bool add)
// computes a full MR x NR tile, reading A(r, p) at a[r*a_row + p*a_col]. A is
// read in place; only B is packed, plus short zero-padded copies of A for the
// ragged bottom rows.
template <std::size_t MR, std::size_t NR, typename Micro>
void packed_gemm(std::size_t m, std::size_t n, std::size_t k, MatrixRef<float> a, MatrixRef<float> b, float* c,
                 std::size_t ldc, bool accumulate, Micro micro) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    if (!accumulate) {
      for (std::size_t i = 0; i < m; ++i) std::fill_n(c + i * ldc, n, 0.0f);
    }
    return;
  }
  thread_local std::vector<float> a_edge;
  thread_local std::vector<float> b_pack;
  const std::size_t nc_max = std::min(kBlockN, (n + NR - 1) / NR * NR);
  const std::size_t kc_max = std::min(kBlockK, k);
  a_edge.resize(MR * kc_max);
  b_pack.resize(nc_max * kc_max);
  alignas(32) float edge[MR * NR];
  const std::size_t m_full = m / MR * MR;

  for (std::size_t jc = 0; jc < n; jc += kBlockN) {
    const std::size_t nc = std::min(kBlockN, n - jc);
    for (std::size_t pc = 0; pc < k; pc += kBlockK) {
      const std::size_t kc = std::min(kBlockK, k - pc);
      const bool add = accumulate || pc > 0;
      pack_b<NR>(b, pc, kc, jc, nc, b_pack.data());
      for (std::size_t ic = 0; ic < m; ic += kBlockM) {
        const std::size_t mc = std::min(kBlockM, m - ic);
        for (std::size_t jr = 0; jr < nc; jr += NR) {
          const std::size_t nr = std::min(NR, nc - jr);
          const float* bp = b_pack.data() + (jr / NR) * kc * NR;
          for (std::size_t ir = 0; ir < mc; ir += MR) {
            const std::size_t row = ic + ir;
            const std::size_t mr = std::min(MR, m - row);
            const float* ap = &a(row, pc);
            std::ptrdiff_t a_row = a.row_stride, a_col = a.col_stride;
            if (row >= m_full) {
              pack_a<MR>(a, row, mr, pc, kc, a_edge.data());
              ap = a_edge.data();
              a_row = 1;
              a_col = MR;
            }
            float* ct = c + row * ldc + jc + jr;
            if (mr == MR && nr == NR) {
              micro(kc, ap, a_row, a_col, bp, ct, ldc, add);
            } else {
              micro(kc, ap, a_row, a_col, bp, edge, NR, false);
              for (std::size_t r = 0; r < mr; ++r) {
                for (std::size_t q = 0; q < nr; ++q) {
                  ct[r * ldc + q] = add ? ct[r * ldc + q] + edge[r * NR + q] : edge[r * NR + q];
                }
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace uhinet::simd::detail
