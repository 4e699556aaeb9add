#include "uhinet/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "uhinet/errors.hpp"

namespace uhinet::num {

GradCheckReport finite_diff_check(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> point, std::span<const double> analytic, double epsilon,
                                  std::span<const std::size_t> coords, double floor) {
  if (!(epsilon >= 1e-6 && epsilon <= 1e-2)) throw ParameterError("finite_diff_check: epsilon outside [1e-6, 1e-2]");
  if (analytic.size() != point.size()) throw DimensionError("finite_diff_check: gradient length mismatch");
  std::vector<double> x(point.begin(), point.end());
  std::vector<std::size_t> all;
  if (coords.empty()) {
    all.resize(x.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    coords = all;
  }
  GradCheckReport report;
  for (std::size_t i : coords) {
    if (i >= x.size()) throw DimensionError("finite_diff_check: coordinate out of range");
    const double saved = x[i];
    x[i] = saved + epsilon;
    const double up = f(x);
    x[i] = saved - epsilon;
    const double down = f(x);
    x[i] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = analytic[i];
    const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
    if (err > report.max_relative_error || report.checked == 0) {
      report.max_relative_error = err;
      report.worst_index = i;
      report.analytic = a;
      report.numeric = numeric;
    }
    ++report.checked;
  }
  return report;
}

}  // namespace uhinet::num
