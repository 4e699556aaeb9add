#pragma once

// Data-parallel inner loops behind the numerics layer. Every kernel has a
// portable scalar reference; vector variants (AVX2+FMA and AVX-512 on x86-64,
// NEON on AArch64) are picked once at runtime, widest first, and can be pinned
// with the UHINET_SIMD environment variable (scalar | avx2 | avx512 | neon).

#include <cstddef>
#include <span>
#include <string_view>

namespace uhinet::simd {

enum class Isa { scalar, avx2, avx512, neon };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);

// The variant used by the dispatching entry points below.
Isa active_isa();

// Pins the dispatch target; throws ParameterError when the host lacks it.
void set_active_isa(Isa isa);

// Strided read-only matrix: element (i, j) lives at data[i*row_stride + j*col_stride].
// Transposed operands are expressed by swapping the strides.
template <typename T>
struct MatrixRef {
  const T* data;
  std::ptrdiff_t row_stride;
  std::ptrdiff_t col_stride;

  const T& operator()(std::size_t i, std::size_t j) const {
    return data[static_cast<std::ptrdiff_t>(i) * row_stride + static_cast<std::ptrdiff_t>(j) * col_stride];
  }
  MatrixRef transposed() const { return {data, col_stride, row_stride}; }
};

template <typename T>
MatrixRef<T> row_major(const T* data, std::size_t cols) {
  return {data, static_cast<std::ptrdiff_t>(cols), 1};
}

struct AdamCoefficients {
  float beta1;
  float beta2;
  float step_size;      // lr / (1 - beta1^t)
  float inv_bias2_sqrt; // 1 / sqrt(1 - beta2^t)
  float eps;
};

// C (m x n, row-major, leading dimension ldc) = A (m x k) * B (k x n), or += when accumulate.
// Summation order over k is fixed per output element, so results are
// reproducible for a given Isa.
void gemm(std::size_t m, std::size_t n, std::size_t k, MatrixRef<float> a, MatrixRef<float> b, float* c,
          std::size_t ldc, bool accumulate);
void gemm(std::size_t m, std::size_t n, std::size_t k, MatrixRef<double> a, MatrixRef<double> b, double* c,
          std::size_t ldc, bool accumulate);

void relu_forward(std::span<const float> in, std::span<float> out);
void relu_forward(std::span<const double> in, std::span<double> out);

// grad_in = grad_out where input > 0, else 0.
void relu_backward(std::span<const float> input, std::span<const float> grad_out, std::span<float> grad_in);
void relu_backward(std::span<const double> input, std::span<const double> grad_out, std::span<double> grad_in);

// sum (a_i - b_i)^2 accumulated in double.
double sum_squared_diff(std::span<const float> a, std::span<const float> b);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);

// One bias-corrected Adam update over a flat parameter block.
void adam_update(std::span<float> param, std::span<const float> grad, std::span<float> m, std::span<float> v,
                 const AdamCoefficients& coeff);

// Per-ISA kernel table, exposed so tests can run variants side by side.
struct KernelTable {
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, MatrixRef<float> a, MatrixRef<float> b, float* c,
               std::size_t ldc, bool accumulate);
  void (*relu_forward)(const float* in, float* out, std::size_t n);
  void (*relu_backward)(const float* input, const float* grad_out, float* grad_in, std::size_t n);
  double (*sum_squared_diff)(const float* a, const float* b, std::size_t n);
  void (*adam_update)(float* param, const float* grad, float* m, float* v, std::size_t n,
                      const AdamCoefficients& coeff);
};

// Throws ParameterError when the host cannot run the variant.
const KernelTable& kernel_table(Isa isa);

}  // namespace uhinet::simd
