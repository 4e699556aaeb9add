#include <cmath>

#include "variants.hpp"

namespace uhinet::simd::scalar {
namespace {

void gemm_f32(std::size_t m, std::size_t n, std::size_t k, MatrixRef<float> a, MatrixRef<float> b, float* c,
              std::size_t ldc, bool accumulate) {
  gemm_reference(m, n, k, a, b, c, ldc, accumulate);
}

void relu_forward_f32(const float* in, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] > 0.0f ? in[i] : 0.0f;
}

void relu_backward_f32(const float* input, const float* grad_out, float* grad_in, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) grad_in[i] = input[i] > 0.0f ? grad_out[i] : 0.0f;
}

double sum_squared_diff_f32(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

void adam_update_f32(float* param, const float* grad, float* m, float* v, std::size_t n,
                     const AdamCoefficients& c) {
  const float one_minus_b1 = 1.0f - c.beta1;
  const float one_minus_b2 = 1.0f - c.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const float g = grad[i];
    m[i] = c.beta1 * m[i] + one_minus_b1 * g;
    v[i] = c.beta2 * v[i] + one_minus_b2 * (g * g);
    const float denom = std::sqrt(v[i]) * c.inv_bias2_sqrt + c.eps;
    param[i] = param[i] - c.step_size * m[i] / denom;
  }
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{gemm_f32, relu_forward_f32, relu_backward_f32, sum_squared_diff_f32, adam_update_f32};
  return t;
}

}  // namespace uhinet::simd::scalar
