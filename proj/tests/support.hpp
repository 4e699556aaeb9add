#pragma once

// Shared fixtures and independent reference implementations for the tests.
// Nothing here calls into the code under test for the quantity it checks.

#include <cmath>
#include <filesystem>
#include <functional>
#include <span>
#include <map>
#include <random>
#include <string>
#include <unistd.h>

#include <algorithm>
#include <vector>

#include "uhinet/datapipe/raster.hpp"
#include "uhinet/numerics/gradcheck.hpp"
#include "uhinet/numerics/tape.hpp"
#include "uhinet/numerics/tensor.hpp"
#include "uhinet/rng.hpp"

namespace testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("uhinet-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

template <typename T>
uhinet::num::BasicTensor<T> random_tensor(uhinet::num::Shape shape, std::uint64_t seed, double lo = -1.0,
                                          double hi = 1.0) {
  uhinet::Rng rng(seed);
  uhinet::num::BasicTensor<T> t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

// Adjusted Rand index between two labelings (Hubert and Arabie).
using T64 = uhinet::num::BasicTensor<double>;
using Tape64 = uhinet::num::GradTape<double>;

// loss = mean(op(inputs)^2) on a fresh tape; returns it with the gradient of every input.
using GraphFn = std::function<Tape64::Var(Tape64&, std::vector<Tape64::Var>&)>;

struct Probe {
  double loss;
  std::vector<T64> grads;
};

inline Probe run_graph(const GraphFn& graph, const std::vector<T64>& inputs) {
  Tape64 tape;
  std::vector<Tape64::Var> vars;
  for (const auto& x : inputs) vars.push_back(tape.input(x, true));
  auto out = graph(tape, vars);
  auto zero = tape.input(T64(tape.value(out).shape()));
  auto loss = uhinet::num::mse_loss(tape, out, zero);
  Probe p{tape.value(loss).item(), {}};
  tape.backward(loss, 0);
  for (auto v : vars) {
    const T64* g = tape.gradient(v);
    p.grads.push_back(g ? *g : T64(tape.value(v).shape()));
  }
  return p;
}

// Worst relative error over every coordinate of every input.
inline double check_graph(const GraphFn& graph, std::vector<T64> inputs, double eps = 1e-5) {
  const Probe base = run_graph(graph, inputs);
  double worst = 0;
  for (std::size_t which = 0; which < inputs.size(); ++which) {
    const std::vector<double> point(inputs[which].storage());
    auto f = [&](std::span<const double> x) {
      auto probe = inputs;
      std::copy(x.begin(), x.end(), probe[which].storage().begin());
      return run_graph(graph, probe).loss;
    };
    worst = std::max(worst,
                     uhinet::num::finite_diff_check(f, point, base.grads[which].storage(), eps).max_relative_error);
  }
  return worst;
}

inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra;
  std::map<int, double> rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    ra[a[i]] += 1;
    rb[b[i]] += 1;
  }
  auto c2 = [](double n) { return n * (n - 1) / 2; };
  double index = 0;
  for (const auto& [k, n] : joint) index += c2(n);
  double sa = 0;
  double sb = 0;
  for (const auto& [k, n] : ra) sa += c2(n);
  for (const auto& [k, n] : rb) sb += c2(n);
  const double expected = sa * sb / c2(static_cast<double>(a.size()));
  const double max_index = (sa + sb) / 2;
  return (index - expected) / (max_index - expected);
}

// Triple loop over days, pixels and the 3x3 window, written without the
// module's helpers. Returns NaN where the pixel is masked.
inline std::vector<double> brute_force_trel(const std::vector<uhinet::data::RasterGrid>& days, double eps) {
  const std::size_t w = days.at(0).width;
  const std::size_t h = days.at(0).height;
  std::vector<double> out(w * h, NAN);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      std::vector<double> per_day;
      bool masked = false;
      for (const auto& g : days) {
        const double t = g.values[y * w + x];
        double sum = 0;
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const long yy = static_cast<long>(y) + dy;
            const long xx = static_cast<long>(x) + dx;
            if (yy < 0 || xx < 0 || yy >= static_cast<long>(h) || xx >= static_cast<long>(w)) continue;
            sum += g.values[static_cast<std::size_t>(yy) * w + static_cast<std::size_t>(xx)];
            ++n;
          }
        }
        if (std::fabs(t) < eps) masked = true;
        per_day.push_back(100.0 * (t - sum / n) / t);
      }
      if (masked) continue;
      std::sort(per_day.begin(), per_day.end());
      const std::size_t m = per_day.size();
      out[y * w + x] = m % 2 ? per_day[m / 2] : (per_day[m / 2 - 1] + per_day[m / 2]) / 2;
    }
  }
  return out;
}

struct NaiveMetrics {
  double pearson, rmse, mae, mape;
};

inline NaiveMetrics naive_metrics(const std::vector<double>& y, const std::vector<double>& p) {
  const double n = static_cast<double>(y.size());
  double my = 0;
  double mp = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    my += y[i];
    mp += p[i];
  }
  my /= n;
  mp /= n;
  double sxy = 0;
  double sxx = 0;
  double syy = 0;
  double se = 0;
  double ae = 0;
  double ape = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sxy += (y[i] - my) * (p[i] - mp);
    sxx += (y[i] - my) * (y[i] - my);
    syy += (p[i] - mp) * (p[i] - mp);
    se += (y[i] - p[i]) * (y[i] - p[i]);
    ae += std::fabs(y[i] - p[i]);
    ape += std::fabs((y[i] - p[i]) / y[i]);
  }
  return {sxy / std::sqrt(sxx * syy), std::sqrt(se / n), ae / n, 100.0 * ape / n};
}

// Closed-form synthetic temperature, written from the world definition.
inline double oracle_formula(double t_mean, double amp, int hour, double lapse, double amp_day, double amp_night,
                             double veg_cooling, double sea_coupling, double t_sea, double elev, double imperv,
                             bool vegetation, double seaprox) {
  const double pi = 3.14159265358979323846;
  const double rad = std::max(0.0, std::sin(pi * (hour - 6) / 12.0));
  const double t_base = t_mean + 0.5 * amp * std::cos(2 * pi * (hour - 15) / 24.0);
  return t_base - lapse * elev + (amp_day * rad + amp_night * (1 - rad)) * imperv - (vegetation ? veg_cooling : 0.0) +
         sea_coupling * seaprox * (t_sea - t_base);
}

}  // namespace testing
