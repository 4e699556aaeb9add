#include "uhinet/numerics/optim.hpp"

#include <cmath>
#include <string>
#include <type_traits>

#include "uhinet/simd/kernels.hpp"

namespace uhinet::num {
namespace {

template <typename T>
void check_grads(std::span<BasicTensor<T>> params, std::span<const BasicTensor<T>> grads) {
  if (params.size() != grads.size()) throw DimensionError("optimizer: parameter/gradient count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != grads[i].shape()) {
      throw DimensionError("optimizer: gradient " + std::to_string(i) + " has shape " +
                           shape_string(grads[i].shape()) + ", parameter " + shape_string(params[i].shape()));
    }
    if (!grads[i].all_finite()) throw NumericError("optimizer: non-finite gradient for parameter " + std::to_string(i));
  }
}

void adam_block(std::span<float> p, std::span<const float> g, std::span<float> m, std::span<float> v,
                const simd::AdamCoefficients& c) {
  simd::adam_update(p, g, m, v, c);
}

void adam_block(std::span<double> p, std::span<const double> g, std::span<double> m, std::span<double> v,
                const AdamOptions& o, double step_size, double inv_bias2_sqrt) {
  const double omb1 = 1.0 - o.beta1, omb2 = 1.0 - o.beta2;
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = o.beta1 * m[i] + omb1 * g[i];
    v[i] = o.beta2 * v[i] + omb2 * (g[i] * g[i]);
    p[i] -= step_size * m[i] / (std::sqrt(v[i]) * inv_bias2_sqrt + o.eps);
  }
}

}  // namespace

template <typename T>
void adam_step(std::span<BasicTensor<T>> params, std::span<const BasicTensor<T>> grads, AdamState<T>& state,
               const AdamOptions& options) {
  check_grads(params, grads);
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw DimensionError("adam: state does not match parameter list");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.m[i].shape() != params[i].shape() || state.v[i].shape() != params[i].shape()) {
      throw DimensionError("adam: moment shape mismatch for parameter " + std::to_string(i));
    }
  }
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double bias1 = 1.0 - std::pow(options.beta1, t);
  const double bias2 = 1.0 - std::pow(options.beta2, t);
  const double step_size = options.lr / bias1;
  const double inv_bias2_sqrt = 1.0 / std::sqrt(bias2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if constexpr (std::is_same_v<T, float>) {
      const simd::AdamCoefficients c{static_cast<float>(options.beta1), static_cast<float>(options.beta2),
                                     static_cast<float>(step_size), static_cast<float>(inv_bias2_sqrt),
                                     static_cast<float>(options.eps)};
      adam_block(params[i].data(), grads[i].data(), state.m[i].data(), state.v[i].data(), c);
    } else {
      adam_block(params[i].data(), grads[i].data(), state.m[i].data(), state.v[i].data(), options, step_size,
                 inv_bias2_sqrt);
    }
  }
}

template <typename T>
void sgd_step(std::span<BasicTensor<T>> params, std::span<const BasicTensor<T>> grads, double lr) {
  check_grads(params, grads);
  const T step = static_cast<T>(lr);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].data();
    auto g = grads[i].data();
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= step * g[j];
  }
}

template void adam_step(std::span<BasicTensor<float>>, std::span<const BasicTensor<float>>, AdamState<float>&,
                        const AdamOptions&);
template void adam_step(std::span<BasicTensor<double>>, std::span<const BasicTensor<double>>, AdamState<double>&,
                        const AdamOptions&);
template void sgd_step(std::span<BasicTensor<float>>, std::span<const BasicTensor<float>>, double);
template void sgd_step(std::span<BasicTensor<double>>, std::span<const BasicTensor<double>>, double);

}  // namespace uhinet::num
