#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "uhinet/errors.hpp"
#include "uhinet/eval/eval.hpp"

using namespace uhinet;
using namespace uhinet::eval;
using data::GridStack;
using data::RasterGrid;
using data::Units;

namespace {

GridStack constant_stack(std::size_t days, float value, std::size_t w = 6, std::size_t h = 5) {
  GridStack s;
  for (std::size_t d = 0; d < days; ++d) {
    s.dates.push_back(data::parse_date("2016-07-01") + std::chrono::days(d));
    s.grids.emplace_back(24, RasterGrid::filled(w, h, Units::celsius, value));
  }
  return s;
}

GridStack random_stack(std::size_t days, Rng& rng) {
  GridStack s = constant_stack(days, 0);
  for (auto& day : s.grids)
    for (auto& g : day)
      for (auto& v : g.values) v = static_cast<float>(rng.uniform(10, 35));
  return s;
}

std::vector<double> random_series(std::size_t n, Rng& rng, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("worked metric examples") {
  const std::vector<double> y{10, 20};
  const std::vector<double> p{12, 18};
  const auto m = regression_metrics(y, p);
  CHECK(m.rmse == doctest::Approx(2.0));
  CHECK(m.mae == doctest::Approx(2.0));
  CHECK(*m.mape == doctest::Approx(15.0));
  CHECK(m.n == 2);

  const std::vector<double> same{3, 1, 4, 1, 5};
  const auto s = regression_metrics(same, same);
  CHECK(*s.pearson == doctest::Approx(1.0));
  CHECK(s.rmse == 0.0);
  CHECK(s.mae == 0.0);
  CHECK(*s.mape == 0.0);

  const std::vector<double> a{-2, -1, 0, 1, 2};
  const std::vector<double> b{2, 1, 0, -1, -2};
  CHECK(pearson(a, b) == doctest::Approx(-1.0));
}

TEST_CASE("metrics match naive formulas on 100 random pairs") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.index(300);
    const auto y = random_series(n, rng, 1.0, 40.0);
    auto p = y;
    for (auto& v : p) v += rng.normal(0, 1.5);
    const auto m = regression_metrics(y, p);
    const auto naive = testing::naive_metrics(y, p);
    CHECK(std::abs(*m.pearson - naive.pearson) <= 1e-12);
    CHECK(std::abs(m.rmse - naive.rmse) <= 1e-12);
    CHECK(std::abs(m.mae - naive.mae) <= 1e-12);
    CHECK(std::abs(*m.mape - naive.mape) <= 1e-12);
    CHECK(m.rmse >= m.mae);
    CHECK(m.mae >= 0.0);
    CHECK((*m.pearson >= -1.0 && *m.pearson <= 1.0));
  }
}

TEST_CASE("pearson is invariant under positive affine maps") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_series(50, rng, -10, 10);
    const auto y = random_series(50, rng, -10, 10);
    const double a = rng.uniform(0.1, 10);
    const double b = rng.uniform(-50, 50);
    auto ax = x;
    for (auto& v : ax) v = a * v + b;
    CHECK(std::abs(pearson(ax, y) - pearson(x, y)) <= 1e-12);
    CHECK(std::abs(pearson(x, ax) - 1.0) <= 1e-12);
  }
}

TEST_CASE("metric errors") {
  const std::vector<double> flat{5, 5, 5};
  const std::vector<double> p{4, 5, 6};
  CHECK_THROWS_AS(pearson(flat, p), NumericError);
  const auto m = regression_metrics(flat, p);
  CHECK_FALSE(m.pearson.has_value());
  CHECK(m.mae == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(regression_metrics(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(regression_metrics(std::vector<double>{1}, std::vector<double>{1}), DimensionError);

  const std::vector<double> y{0.0, 10.0, 20.0};
  const std::vector<double> q{1.0, 11.0, 18.0};
  const auto g = regression_metrics(y, q);
  CHECK(g.excluded_mape_terms == 1);
  CHECK(*g.mape == doctest::Approx(100.0 * (0.1 + 0.1) / 2));
  const auto all_out = regression_metrics(std::vector<double>{0, 0.1}, std::vector<double>{1, 2}, 1.0);
  CHECK_FALSE(all_out.mape.has_value());
  CHECK(all_out.excluded_mape_terms == 2);
}

TEST_CASE("station series extraction") {
  GridStack s = constant_stack(2, 7.0F);
  StationSpec st{"a", 3, 2, {}, {}, {}};
  auto series = extract_station_series(s, st);
  CHECK(series.size() == 48);
  CHECK(std::all_of(series.begin(), series.end(), [](double v) { return v == 7.0; }));
  s.grids[1][14].at(3, 2) = 99.0F;
  series = extract_station_series(s, st);
  CHECK(series[38] == 99.0);
  CHECK(std::count(series.begin(), series.end(), 99.0) == 1);
  StationSpec outside{"b", 6, 0, {}, {}, {}};
  CHECK_THROWS_AS(extract_station_series(s, outside), ConfigError);
  s.grids[0][3].set_nodata(3, 2);
  CHECK_THROWS_AS(extract_station_series(s, st), DataError);
}

TEST_CASE("hourly aggregate") {
  Rng rng(6);
  GridStack s = random_stack(3, rng);
  const auto agg = hourly_aggregate(s);
  CHECK(agg.size() == 24);
  for (int h = 0; h < 24; ++h) {
    for (std::size_t i = 0; i < agg[h].values.size(); ++i) {
      double sum = 0;
      for (std::size_t d = 0; d < 3; ++d) sum += s.grids[d][h].values[i];
      REQUIRE(agg[h].values[i] == static_cast<float>(sum / 3.0));
    }
  }
  GridStack one = s;
  one.dates.resize(1);
  one.grids.resize(1);
  CHECK(hourly_aggregate(one) == one.grids[0]);

  GridStack two = constant_stack(2, 10.0F);
  for (auto& g : two.grids[1]) std::fill(g.values.begin(), g.values.end(), 20.0F);
  CHECK(hourly_aggregate(two)[5].values[0] == 15.0F);

  GridStack perm = s;
  std::swap(perm.grids[0], perm.grids[2]);
  std::swap(perm.dates[0], perm.dates[2]);
  CHECK(hourly_aggregate(perm) == agg);

  two.grids[0][4].set_nodata(0, 0);
  CHECK(hourly_aggregate(two)[4].values[0] == 20.0F);
  two.grids[1][4].set_nodata(0, 0);
  CHECK(hourly_aggregate(two)[4].is_nodata(0, 0));
}

TEST_CASE("station report") {
  Rng rng(9);
  const GridStack a = random_stack(2, rng);
  std::vector<StationSpec> stations;
  for (int i = 0; i < 7; ++i) {
    stations.push_back({"s" + std::to_string(6 - i), static_cast<std::size_t>(i % 6), static_cast<std::size_t>(i % 5), {}, {}, {}});
  }
  const auto same = station_report(stations, a, a);
  CHECK(same.size() == 7);
  CHECK(same.front().station == "s0");
  for (const auto& r : same) {
    CHECK(r.comparison == "A-vs-B");
    CHECK(*r.metrics.pearson == doctest::Approx(1.0));
    CHECK(r.metrics.rmse == 0.0);
    CHECK(r.metrics.mae == 0.0);
    CHECK(*r.metrics.mape == 0.0);
    CHECK(r.metrics.n == 48);
  }

  const GridStack b = random_stack(2, rng);
  for (auto& st : stations) {
    for (std::size_t d = 0; d < 2; ++d) {
      for (int h = 0; h < 24; ++h) {
        st.real_times.push_back(data::hour_stamp(a.dates[d], h));
        st.real_values.push_back(20.0 + h * 0.1);
      }
    }
    st.series_file = "x.csv";
  }
  const auto full = station_report(stations, a, b);
  CHECK(full.size() == 21);
  CHECK(full[0].comparison == "A-vs-B");
  CHECK(full[1].comparison == "A-vs-real");
  CHECK(full[2].comparison == "B-vs-real");
  const auto csv = report_csv(full);
  CHECK(csv.rfind("station,comparison,pearson,rmse,mae,mape,n,excluded_mape_terms\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);

  // A-vs-B treats B as the reference.
  const auto sa = extract_station_series(a, stations[6]);
  const auto sb = extract_station_series(b, stations[6]);
  const auto ab = regression_metrics(sb, sa);
  CHECK(full[0].metrics.mape == ab.mape);

  GridStack shifted = b;
  shifted.dates[1] += std::chrono::days(5);
  CHECK_THROWS_AS(station_report(stations, a, shifted), DataError);
  stations[0].real_times.pop_back();
  stations[0].real_values.pop_back();
  CHECK_THROWS_AS(station_report(stations, a, b), DataError);
}

TEST_CASE("stations file") {
  testing::TempDir dir("stations");
  data::write_file(dir / "m/a.csv", "timestamp,t_degC\n2016-07-01T00:00:00,21.5\n2016-07-01T01:00:00,21.0\n");
  data::write_file(dir / "stations.json",
                   R"([{"name":"a","x":3,"y":4,"series_file":"m/a.csv"},{"name":"b","x":1,"y":2}])");
  const auto st = read_stations(dir / "stations.json");
  REQUIRE(st.size() == 2);
  CHECK(st[0].real_values == std::vector<double>{21.5, 21.0});
  CHECK(st[0].real_times[1] - st[0].real_times[0] == 1);
  CHECK_FALSE(st[1].series_file.has_value());
  data::write_file(dir / "bad.json", R"([{"name":"a","x":-3,"y":4}])");
  CHECK_THROWS_AS(read_stations(dir / "bad.json"), ConfigError);
  data::write_file(dir / "bad2.json", R"([{"name":"a","x":1.5,"y":4}])");
  CHECK_THROWS_AS(read_stations(dir / "bad2.json"), ConfigError);
}
