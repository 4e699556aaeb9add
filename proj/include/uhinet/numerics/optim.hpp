#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uhinet/numerics/tensor.hpp"

namespace uhinet::num {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment accumulators, one pair per parameter tensor.
template <typename T>
struct AdamState {
  std::vector<BasicTensor<T>> m;
  std::vector<BasicTensor<T>> v;
  std::int64_t t = 0;

  static AdamState zeros_like(std::span<const BasicTensor<T>> params) {
    AdamState s;
    for (const auto& p : params) {
      s.m.emplace_back(p.shape());
      s.v.emplace_back(p.shape());
    }
    return s;
  }

  bool operator==(const AdamState&) const = default;
};

// Bias-corrected Adam. Throws NumericError on a non-finite gradient before any
// parameter or moment is touched.
template <typename T>
void adam_step(std::span<BasicTensor<T>> params, std::span<const BasicTensor<T>> grads, AdamState<T>& state,
               const AdamOptions& options);

// Plain gradient descent, the alternative optimizer.
template <typename T>
void sgd_step(std::span<BasicTensor<T>> params, std::span<const BasicTensor<T>> grads, double lr);

}  // namespace uhinet::num
