#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "uhinet/datapipe/calendar.hpp"
#include "uhinet/datapipe/examples.hpp"
#include "uhinet/datapipe/stack.hpp"
#include "uhinet/datapipe/synth.hpp"
#include "uhinet/errors.hpp"

using namespace uhinet;
using namespace uhinet::data;

namespace {

SynthWorldConfig small_world(int days = 30) {
  SynthWorldConfig c;
  c.domain = 64;
  c.seed = 5;
  c.days = days;
  c.start_date = "2016-06-01";
  c.sea_rows = 6;
  c.urban_blobs = 3;
  return c;
}

}  // namespace

TEST_CASE("calendar") {
  const Date d = parse_date("2016-02-29");
  CHECK(format_date(d) == "2016-02-29");
  CHECK(day_of_year(d) == 60);
  CHECK(month_of(d) == 2U);
  CHECK_THROWS(parse_date("2015-02-29"));
  CHECK_THROWS(parse_date("2016-2-1"));
  const HourStamp t = hour_stamp(d, 23);
  CHECK(stamp_date(t) == d);
  CHECK(stamp_hour(t) == 23);
  CHECK(stamp_date(t + 1) == parse_date("2016-03-01"));
  CHECK(format_timestamp(t) == "2016-02-29T23:00:00");
  CHECK(parse_timestamp("2016-02-29T23:00:00Z") == t);
  CHECK_THROWS(parse_timestamp("2016-02-29T23:30:00"));
  CHECK(stamp_hour(hour_stamp(parse_date("1969-12-31"), 5)) == 5);
}

TEST_CASE("GRD1 round trip") {
  RasterGrid g = RasterGrid::filled(5, 3, Units::celsius, 1.5F);
  g.at(4, 2) = -3.25F;
  g.set_nodata(1, 1);
  g.at(1, 1) = kGrdNodata;
  const std::string bytes = encode_grd1(g);
  const auto header_end = bytes.find('\n');
  const auto header = nlohmann::json::parse(bytes.substr(0, header_end));
  CHECK(header.at("magic") == "GRD1");
  CHECK(header.at("width") == 5);
  CHECK(header.at("height") == 3);
  CHECK(header.at("cell_size_m") == 100);
  CHECK(header.at("units") == "degC");
  CHECK(bytes.size() == header_end + 1 + 15 * 4);
  const RasterGrid back = decode_grd1(bytes);
  CHECK(back == g);
  CHECK(back.is_nodata(1, 1));
  CHECK_FALSE(back.is_nodata(0, 0));
  CHECK_THROWS_AS(decode_grd1(bytes.substr(0, bytes.size() - 3)), FormatError);
  CHECK_THROWS_AS(decode_grd1("GRD2\n"), FormatError);
  std::string bad = bytes;
  bad.replace(bad.find("GRD1"), 4, "GRDX");
  CHECK_THROWS_AS(decode_grd1(bad), FormatError);

  testing::TempDir dir("grd");
  write_grd1(dir / "a/b.grd", g);
  CHECK(read_grd1(dir / "a/b.grd") == g);
}

TEST_CASE("normalization round trip and endpoints") {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double lo = rng.uniform(-100, 100);
    const VariableRange r{lo, lo + rng.uniform(1e-3, 200)};
    const double x = rng.uniform(-500, 500);
    CHECK(std::fabs(denormalize(normalize(x, r), r) - x) <= 1e-9);
    CHECK(normalize(r.min, r) == -1.0);
    CHECK(normalize(r.max, r) == 1.0);
  }
  const VariableRange r{0, 40};
  CHECK(denormalize(-1, r) == 0.0);
  CHECK(denormalize(1, r) == 40.0);
  CHECK(denormalize(0, r) == 20.0);
}

TEST_CASE("fit_range and manifest") {
  const std::vector<float> v{3, -1, 7, 2};
  const auto r = fit_range(std::span<const float>(v), "x");
  CHECK(r.min == -1.0);
  CHECK(r.max == 7.0);
  const std::vector<float> flat{2, 2, 2};
  CHECK_THROWS_AS(fit_range(std::span<const float>(flat), "x"), DataError);
  CHECK_THROWS_AS(fit_range(std::span<const float>(), "x"), DataError);
  const std::vector<float> bad{1, NAN};
  CHECK_THROWS_AS(fit_range(std::span<const float>(bad), "x"), DataError);

  NormalizationManifest m;
  m.set(var::elevation, {0.5, 812.25});
  m.set(var::target, {8.390000343322754, 31.77});
  CHECK(NormalizationManifest::from_json(m.to_json()).ranges() == m.ranges());
  CHECK_THROWS_AS(m.at(var::precip), ConfigError);
}

TEST_CASE("land-cover anchors") {
  CHECK(landcover_anchor(LandCover::water) == -1.0F);
  CHECK(landcover_anchor(LandCover::vegetation) == doctest::Approx(-0.33));
  CHECK(landcover_anchor(LandCover::urban) == doctest::Approx(0.33));
  CHECK(landcover_anchor(LandCover::industrial) == 1.0F);
  CHECK_THROWS_AS(landcover_anchor_code(4), DataError);
  CHECK_THROWS_AS(landcover_anchor_code(1.5), DataError);
}

TEST_CASE("patches partition the domain") {
  const auto patches = make_patches(256, 256);
  CHECK(patches.size() == 64);
  std::vector<int> cover(256 * 256, 0);
  for (const auto& p : patches) {
    for (std::size_t y = p.row0; y < p.row0 + p.size; ++y)
      for (std::size_t x = p.col0; x < p.col0 + p.size; ++x) cover[y * 256 + x]++;
  }
  CHECK(std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; }));
  CHECK_THROWS_AS(make_patches(250, 256), ConfigError);
}

TEST_CASE("split") {
  const auto patches = make_patches(256, 256);
  SplitSpec spec;
  const auto a = split_patches(patches, spec);
  CHECK(patches_in(a, Split::train).size() == 48);
  CHECK(patches_in(a, Split::val).size() == 5);
  CHECK(patches_in(a, Split::test).size() == 6);
  CHECK(patches_in(a, Split::excluded).size() == 5);
  const auto b = split_patches(patches, spec);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].split == b[i].split);

  SplitSpec listed;
  listed.train = {0, 1, 2};
  listed.test = {9};
  const auto c = split_patches(patches, listed);
  CHECK(patches_in(c, Split::train).size() == 3);
  CHECK(c[9].split == Split::test);
  CHECK(c[10].split == Split::excluded);
  listed.val = {2};
  CHECK_THROWS_AS(split_patches(patches, listed), ConfigError);
  listed.val = {99};
  CHECK_THROWS_AS(split_patches(patches, listed), ConfigError);

  CHECK(SplitSpec::from_json(spec.to_json()).n_train == 48);
  CHECK_THROWS_AS(SplitSpec::from_json({{"n_trian", 3}}), ConfigError);
}

TEST_CASE("met series") {
  const SynthWorld world(small_world(3));
  const MetSeries& met = world.met();
  CHECK(met.size() == 72);
  const MetSeries back = decode_met_csv(encode_met_csv(met));
  CHECK(back == met);
  CHECK(encode_met_csv(met).rfind("timestamp,t2m_degC,precip_mmph,q_gkg,u10_ms,v10_ms\n", 0) == 0);
  auto rows = met.rows();
  rows.pop_back();
  CHECK_THROWS_AS(MetSeries{rows}, DataError);
  auto swapped = met.rows();
  std::swap(swapped[3], swapped[4]);
  CHECK_THROWS_AS(MetSeries{swapped}, DataError);
  CHECK_THROWS_AS(met.at(hour_stamp(parse_date("2016-06-01"), 0) - 1), DataError);
}

TEST_CASE("met window reaches into the previous day") {
  const SynthWorld world(small_world(3));
  NormalizationManifest m;
  for (const char* v : met_variable_names()) m.set(v, {-50, 50});
  const HourStamp t = hour_stamp(parse_date("2016-06-02"), 0);
  const auto w = met_window(world.met(), t, m);
  CHECK(w.shape() == num::Shape{3, 5});
  CHECK(w.at(0, 0) == doctest::Approx(normalize(world.met().at(t - 2).t2m, m.at(var::t2m))));
  CHECK(w.at(2, 3) == doctest::Approx(normalize(world.met().at(t).u10, m.at(var::u10))));
  CHECK_THROWS_AS(met_window(world.met(), hour_stamp(parse_date("2016-06-01"), 1), m), DataError);
}

TEST_CASE("synthetic world") {
  const SynthWorld a(small_world());
  const SynthWorld b(small_world());
  CHECK(a.layers().elevation == b.layers().elevation);
  CHECK(a.layers().imperviousness == b.layers().imperviousness);
  CHECK(a.layers().landcover == b.layers().landcover);
  CHECK(a.met() == b.met());
  const Date d = parse_date("2016-06-10");
  CHECK(a.oracle(d, 14) == b.oracle(d, 14));
  a.layers().validate();

  const auto& c = a.config();
  SUBCASE("worked differences") {
    const double tb = 25.0;
    CHECK(synth_temperature(c, tb, 10, 1000, 0, LandCover::urban, 0) -
              synth_temperature(c, tb, 10, 0, 0, LandCover::urban, 0) ==
          doctest::Approx(-6.5).epsilon(1e-12));
    CHECK(synth_temperature(c, tb, 0, 0, 1, LandCover::urban, 0) -
              synth_temperature(c, tb, 0, 0, 0, LandCover::urban, 0) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(diurnal_radiation(0) == 0.0);
    CHECK(diurnal_radiation(12) == doctest::Approx(1.0));
  }
  SUBCASE("noise-free oracle equals an independent evaluation of the formula") {
    for (int hour : {0, 5, 14, 21}) {
      const RasterGrid g = a.oracle(d, hour, false);
      const SynthDay& day = a.day(d);
      for (std::size_t i = 0; i < g.values.size(); ++i) {
        const double expect = testing::oracle_formula(
            day.t_mean, day.amplitude, hour, c.lapse_rate, c.amp_day, c.amp_night, c.veg_cooling, c.sea_coupling,
            c.sea_temperature, a.layers().elevation.values[i], a.layers().imperviousness.values[i],
            a.layers().landcover.values[i] == 1.0F, a.sea_proximity().values[i]);
        REQUIRE(std::fabs(g.values[i] - expect) <= 1e-5 * std::max(1.0, std::fabs(expect)));
      }
    }
  }
  SUBCASE("met t2m follows the base temperature") {
    const SynthDay& day = a.day(d);
    for (int h = 0; h < 24; ++h) {
      CHECK(a.met().at(hour_stamp(d, h)).t2m == doctest::Approx(base_temperature(day.t_mean, day.amplitude, h)));
    }
  }
  SUBCASE("layers within their declared ranges") {
    for (float v : a.layers().imperviousness.values) CHECK((v >= 0.0F && v <= 1.0F));
    for (float v : a.layers().elevation.values) CHECK((v >= 0.0F && v <= 1000.0F));
    std::set<float> codes(a.layers().landcover.values.begin(), a.layers().landcover.values.end());
    for (float v : codes) CHECK(valid_landcover_code(v));
    CHECK(codes.count(0.0F));  // the sea band
  }
  SUBCASE("noise is seeded and small") {
    const RasterGrid noisy = a.oracle(d, 3, true);
    const RasterGrid clean = a.oracle(d, 3, false);
    double s = 0;
    for (std::size_t i = 0; i < noisy.values.size(); ++i) s += std::pow(noisy.values[i] - clean.values[i], 2);
    const double sd = std::sqrt(s / static_cast<double>(noisy.values.size()));
    CHECK(sd == doctest::Approx(c.noise_sigma).epsilon(0.1));
  }
  CHECK_THROWS_AS(a.oracle(parse_date("2019-01-01"), 0), DataError);
  CHECK_THROWS_AS(SynthWorldConfig::from_json({{"lapse", 1}}), ConfigError);
}

TEST_CASE("example count law: 1 patch x 164 days = 3936") {
  SynthWorldConfig c = small_world(170);
  const SynthWorld world(c);
  const auto patches = split_patches(make_patches(64, 64), [] {
    SplitSpec s;
    s.train = {0};
    return s;
  }());
  const auto train = patches_in(patches, Split::train);
  std::vector<Date> days;
  for (int i = 1; i <= 164; ++i) days.push_back(parse_date("2016-06-01") + std::chrono::days(i));
  const auto provider = world.provider(false);
  const auto manifest = fit_training_manifest(world.layers(), train, world.met(), provider, days);
  const auto examples = assemble_examples(train, world.layers(), world.met(), provider, days, manifest);
  CHECK(examples.size() == 3936);
  CHECK(examples.size() == train.size() * days.size() * 24);
  CHECK(examples.front().spatial->shape() == num::Shape{32, 32, 3});
  CHECK(examples.front().met.shape() == num::Shape{3, 5});
  CHECK(examples.front().target.shape() == num::Shape{32, 32, 1});
  CHECK(examples[25].day_id == 1);
  CHECK(examples[25].hour == 1);
  for (const auto& e : examples) {
    for (float v : e.target.storage()) REQUIRE((v >= -1.0F - 1e-6F && v <= 1.0F + 1e-6F));
  }
}

TEST_CASE("assembly names what is missing") {
  const SynthWorld world(small_world(5));
  const auto patches = make_patches(64, 64);
  const std::vector<PatchIndex> one{patches[0]};
  std::vector<Date> days{parse_date("2016-06-03")};
  NormalizationManifest m = fit_training_manifest(world.layers(), one, world.met(), world.provider(false), days);
  TargetProvider missing = [](Date, int) -> RasterGrid { throw DataError("no grid"); };
  CHECK_THROWS_AS(assemble_examples(one, world.layers(), world.met(), missing, days, m), DataError);
  days.push_back(parse_date("2016-07-30"));
  CHECK_THROWS_AS(assemble_examples(one, world.layers(), world.met(), world.provider(false), days, m), DataError);
}

TEST_CASE("manifest ignores test patches") {
  const SynthWorld world(small_world(10));
  const auto base = make_patches(64, 64);
  std::vector<Date> days{parse_date("2016-06-04"), parse_date("2016-06-05")};
  SplitSpec s1;
  s1.train = {0, 3};
  s1.test = {1};
  SplitSpec s2;
  s2.train = {0, 3};
  s2.test = {1, 2};
  const auto m1 = fit_training_manifest(world.layers(), patches_in(split_patches(base, s1), Split::train), world.met(),
                                        world.provider(), days);
  const auto m2 = fit_training_manifest(world.layers(), patches_in(split_patches(base, s2), Split::train), world.met(),
                                        world.provider(), days);
  CHECK(m1.to_json() == m2.to_json());
}

TEST_CASE("shuffle is seeded") {
  const SynthWorld world(small_world(5));
  const auto patches = make_patches(64, 64);
  const std::vector<PatchIndex> two{patches[0], patches[1]};
  std::vector<Date> days{parse_date("2016-06-03")};
  const auto m = fit_training_manifest(world.layers(), two, world.met(), world.provider(false), days);
  auto a = assemble_examples(two, world.layers(), world.met(), world.provider(false), days, m);
  auto b = a;
  shuffle_examples(a, 3);
  shuffle_examples(b, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].patch_id == b[i].patch_id);
    CHECK(a[i].hour == b[i].hour);
  }
}

TEST_CASE("grid stacks on disk") {
  testing::TempDir dir("stack");
  GridStack s;
  for (int d = 0; d < 2; ++d) {
    s.dates.push_back(parse_date("2016-07-01") + std::chrono::days(d));
    std::vector<RasterGrid> hours;
    for (int h = 0; h < 24; ++h) hours.push_back(RasterGrid::filled(4, 3, Units::celsius, float(d * 100 + h)));
    s.grids.push_back(hours);
  }
  write_stack(dir.path(), s);
  CHECK(stack_file(dir.path(), s.dates[1], 7) == dir.path() / "2016-07-02" / "h07.grd");
  CHECK(stack_dates(dir.path()) == s.dates);
  const auto back = read_stack(dir.path(), s.dates);
  CHECK(back.grids == s.grids);
  s.grids[1].pop_back();
  CHECK_THROWS_AS(s.validate(), DataError);
}
