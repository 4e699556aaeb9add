// AArch64 variant; NEON is baseline there so no runtime probe is needed.
#include <arm_neon.h>

#include <cmath>

#include "packed_gemm.hpp"
#include "variants.hpp"

namespace uhinet::simd::neon {
namespace {

constexpr std::size_t kMR = 6;
constexpr std::size_t kNR = 16;

inline void micro_6x16(std::size_t kc, const float* ap, std::ptrdiff_t rs, std::ptrdiff_t cs, const float* bp,
                       float* c, std::size_t ldc, bool add) {
  float32x4_t acc[kMR][4];
  for (auto& row : acc) {
    for (auto& q : row) q = vdupq_n_f32(0.0f);
  }
  for (std::size_t p = 0; p < kc; ++p) {
    const float32x4_t b0 = vld1q_f32(bp);
    const float32x4_t b1 = vld1q_f32(bp + 4);
    const float32x4_t b2 = vld1q_f32(bp + 8);
    const float32x4_t b3 = vld1q_f32(bp + 12);
    const std::ptrdiff_t o = static_cast<std::ptrdiff_t>(p) * cs;
    for (std::size_t r = 0; r < kMR; ++r) {
      const float a = ap[static_cast<std::ptrdiff_t>(r) * rs + o];
      acc[r][0] = vfmaq_n_f32(acc[r][0], b0, a);
      acc[r][1] = vfmaq_n_f32(acc[r][1], b1, a);
      acc[r][2] = vfmaq_n_f32(acc[r][2], b2, a);
      acc[r][3] = vfmaq_n_f32(acc[r][3], b3, a);
    }
    bp += kNR;
  }
  for (std::size_t r = 0; r < kMR; ++r) {
    float* row = c + r * ldc;
    for (std::size_t q = 0; q < 4; ++q) {
      float32x4_t out = acc[r][q];
      if (add) out = vaddq_f32(vld1q_f32(row + 4 * q), out);
      vst1q_f32(row + 4 * q, out);
    }
  }
}

void gemm_f32(std::size_t m, std::size_t n, std::size_t k, MatrixRef<float> a, MatrixRef<float> b, float* c,
              std::size_t ldc, bool accumulate) {
  detail::packed_gemm<kMR, kNR>(m, n, k, a, b, c, ldc, accumulate, micro_6x16);
}

void relu_forward_f32(const float* in, float* out, std::size_t n) {
  const float32x4_t zero = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(out + i, vmaxq_f32(vld1q_f32(in + i), zero));
  for (; i < n; ++i) out[i] = in[i] > 0.0f ? in[i] : 0.0f;
}

void relu_backward_f32(const float* input, const float* grad_out, float* grad_in, std::size_t n) {
  const float32x4_t zero = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t mask = vcgtq_f32(vld1q_f32(input + i), zero);
    vst1q_f32(grad_in + i, vreinterpretq_f32_u32(vandq_u32(vreinterpretq_u32_f32(vld1q_f32(grad_out + i)), mask)));
  }
  for (; i < n; ++i) grad_in[i] = input[i] > 0.0f ? grad_out[i] : 0.0f;
}

double sum_squared_diff_f32(const float* a, const float* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t va = vld1q_f32(a + i);
    const float32x4_t vb = vld1q_f32(b + i);
    const float64x2_t lo = vsubq_f64(vcvt_f64_f32(vget_low_f32(va)), vcvt_f64_f32(vget_low_f32(vb)));
    const float64x2_t hi = vsubq_f64(vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
    acc0 = vfmaq_f64(acc0, lo, lo);
    acc1 = vfmaq_f64(acc1, hi, hi);
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

void adam_update_f32(float* param, const float* grad, float* m, float* v, std::size_t n,
                     const AdamCoefficients& c) {
  const float32x4_t b1 = vdupq_n_f32(c.beta1);
  const float32x4_t b2 = vdupq_n_f32(c.beta2);
  const float32x4_t omb1 = vdupq_n_f32(1.0f - c.beta1);
  const float32x4_t omb2 = vdupq_n_f32(1.0f - c.beta2);
  const float32x4_t step = vdupq_n_f32(c.step_size);
  const float32x4_t ib2 = vdupq_n_f32(c.inv_bias2_sqrt);
  const float32x4_t eps = vdupq_n_f32(c.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t g = vld1q_f32(grad + i);
    const float32x4_t mi = vaddq_f32(vmulq_f32(b1, vld1q_f32(m + i)), vmulq_f32(omb1, g));
    const float32x4_t vi = vaddq_f32(vmulq_f32(b2, vld1q_f32(v + i)), vmulq_f32(omb2, vmulq_f32(g, g)));
    vst1q_f32(m + i, mi);
    vst1q_f32(v + i, vi);
    const float32x4_t denom = vaddq_f32(vmulq_f32(vsqrtq_f32(vi), ib2), eps);
    vst1q_f32(param + i, vsubq_f32(vld1q_f32(param + i), vdivq_f32(vmulq_f32(step, mi), denom)));
  }
  if (i < n) scalar::table().adam_update(param + i, grad + i, m + i, v + i, n - i, c);
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{gemm_f32, relu_forward_f32, relu_backward_f32, sum_squared_diff_f32, adam_update_f32};
  return t;
}

}  // namespace uhinet::simd::neon
