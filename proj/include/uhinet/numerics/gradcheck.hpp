#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace uhinet::num {

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;  // at worst_index
  double numeric = 0.0;
  std::size_t checked = 0;
};

// Central differences (f(x+e) - f(x-e)) / 2e at each probed coordinate,
// compared with `analytic`. Relative error is |a - n| / max(|a|, |n|, floor).
// `coords` empty means every coordinate. epsilon must lie in [1e-6, 1e-2].
GradCheckReport finite_diff_check(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> point, std::span<const double> analytic, double epsilon,
                                  std::span<const std::size_t> coords = {}, double floor = 1e-7);

}  // namespace uhinet::num
