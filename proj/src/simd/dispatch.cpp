#include <atomic>
#include <cstdlib>
#include <string>

#include "uhinet/errors.hpp"
#include "variants.hpp"

namespace uhinet::simd {
namespace {

Isa detect_best() {
#if defined(UHINET_HAVE_NEON)
  return Isa::neon;
#else
  if (isa_supported(Isa::avx512)) return Isa::avx512;
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
#endif
}

Isa initial_isa() {
  const char* env = std::getenv("UHINET_SIMD");
  if (env == nullptr) return detect_best();
  const std::string want(env);
  if (want == "scalar") return Isa::scalar;
  if (want == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
  if (want == "avx512" && isa_supported(Isa::avx512)) return Isa::avx512;
  if (want == "neon" && isa_supported(Isa::neon)) return Isa::neon;
  return detect_best();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

const KernelTable& current() { return kernel_table(active().load(std::memory_order_relaxed)); }

template <typename T>
void check_same(std::span<const T> a, std::span<T> b) {
  if (a.size() != b.size()) throw DimensionError("simd kernel: operand length mismatch");
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::avx512:
      return "avx512";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(UHINET_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::avx512:
#if defined(UHINET_HAVE_AVX512)
      return isa_supported(Isa::avx2) && __builtin_cpu_supports("avx512f");
#else
      return false;
#endif
    case Isa::neon:
#if defined(UHINET_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw ParameterError("simd: " + std::string(isa_name(isa)) + " not supported on this host");
  active().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernel_table(Isa isa) {
  if (!isa_supported(isa)) throw ParameterError("simd: " + std::string(isa_name(isa)) + " not supported on this host");
  switch (isa) {
#if defined(UHINET_HAVE_AVX2)
    case Isa::avx2:
      return avx2::table();
#endif
#if defined(UHINET_HAVE_AVX512)
    case Isa::avx512:
      return avx512::table();
#endif
#if defined(UHINET_HAVE_NEON)
    case Isa::neon:
      return neon::table();
#endif
    default:
      return scalar::table();
  }
}

void gemm(std::size_t m, std::size_t n, std::size_t k, MatrixRef<float> a, MatrixRef<float> b, float* c,
          std::size_t ldc, bool accumulate) {
  current().gemm(m, n, k, a, b, c, ldc, accumulate);
}

void gemm(std::size_t m, std::size_t n, std::size_t k, MatrixRef<double> a, MatrixRef<double> b, double* c,
          std::size_t ldc, bool accumulate) {
  scalar::gemm_reference(m, n, k, a, b, c, ldc, accumulate);
}

void relu_forward(std::span<const float> in, std::span<float> out) {
  check_same(in, out);
  current().relu_forward(in.data(), out.data(), in.size());
}

void relu_forward(std::span<const double> in, std::span<double> out) {
  check_same(in, out);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

void relu_backward(std::span<const float> input, std::span<const float> grad_out, std::span<float> grad_in) {
  check_same(input, grad_in);
  check_same(grad_out, grad_in);
  current().relu_backward(input.data(), grad_out.data(), grad_in.data(), input.size());
}

void relu_backward(std::span<const double> input, std::span<const double> grad_out, std::span<double> grad_in) {
  check_same(input, grad_in);
  check_same(grad_out, grad_in);
  for (std::size_t i = 0; i < input.size(); ++i) grad_in[i] = input[i] > 0.0 ? grad_out[i] : 0.0;
}

double sum_squared_diff(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw DimensionError("simd kernel: operand length mismatch");
  return current().sum_squared_diff(a.data(), b.data(), a.size());
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("simd kernel: operand length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void adam_update(std::span<float> param, std::span<const float> grad, std::span<float> m, std::span<float> v,
                 const AdamCoefficients& coeff) {
  const auto n = param.size();
  if (grad.size() != n || m.size() != n || v.size() != n) throw DimensionError("adam_update: length mismatch");
  current().adam_update(param.data(), grad.data(), m.data(), v.data(), n, coeff);
}

}  // namespace uhinet::simd
