#include "uhinet/datapipe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uhinet/config_json.hpp"
#include "uhinet/errors.hpp"
#include "uhinet/rng.hpp"

namespace uhinet::data {

namespace {

constexpr double kPi = std::numbers::pi;

// Seed streams.
constexpr std::uint64_t kTerrainStream = 0x7e44a1;
constexpr std::uint64_t kUrbanStream = 0x0cb4;
constexpr std::uint64_t kWeatherStream = 0xd4e7;
constexpr std::uint64_t kNoiseStream = 0x0a1e;

// Winter, spring, summer, autumn weights over the twelve types.
constexpr std::array<std::array<double, 12>, 4> kSeasonWeights = {{
    {0.40, 0.30, 0.30, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.10, 0, 0.10, 0, 0, 0, 0, 0.50, 0.30, 0, 0, 0},
    {0, 0, 0, 0.35, 0.25, 0.20, 0.20, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 0, 0.40, 0.30, 0.30},
}};

int season_of(Date d) {
  switch (month_of(d)) {
    case 12: case 1: case 2: return 0;
    case 3: case 4: case 5: return 1;
    case 6: case 7: case 8: case 9: return 2;
    default: return 3;
  }
}

double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Bilinear lattice noise in [0,1] with cells of `cell` pixels.
std::vector<double> lattice_noise(std::size_t n, std::size_t cell, Rng& rng) {
  const std::size_t lattice = n / cell + 2;
  std::vector<double> knots(lattice * lattice);
  for (auto& k : knots) k = rng.uniform();
  std::vector<double> out(n * n);
  for (std::size_t y = 0; y < n; ++y) {
    const double fy = static_cast<double>(y) / static_cast<double>(cell);
    const std::size_t iy = static_cast<std::size_t>(fy);
    const double ty = smoothstep(0.0, 1.0, fy - static_cast<double>(iy));
    for (std::size_t x = 0; x < n; ++x) {
      const double fx = static_cast<double>(x) / static_cast<double>(cell);
      const std::size_t ix = static_cast<std::size_t>(fx);
      const double tx = smoothstep(0.0, 1.0, fx - static_cast<double>(ix));
      const double a = knots[iy * lattice + ix];
      const double b = knots[iy * lattice + ix + 1];
      const double c = knots[(iy + 1) * lattice + ix];
      const double d = knots[(iy + 1) * lattice + ix + 1];
      out[y * n + x] = (a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty;
    }
  }
  return out;
}

void box_blur(std::vector<double>& f, std::size_t n) {
  std::vector<double> tmp(f.size());
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      double s = 0.0;
      int c = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const auto yy = static_cast<std::ptrdiff_t>(y) + dy;
          const auto xx = static_cast<std::ptrdiff_t>(x) + dx;
          if (yy < 0 || xx < 0 || yy >= static_cast<std::ptrdiff_t>(n) || xx >= static_cast<std::ptrdiff_t>(n)) continue;
          s += f[static_cast<std::size_t>(yy) * n + static_cast<std::size_t>(xx)];
          ++c;
        }
      }
      tmp[y * n + x] = s / c;
    }
  }
  f.swap(tmp);
}

RasterGrid make_grid(std::size_t n, Units units) {
  RasterGrid g = RasterGrid::filled(n, n, units);
  g.origin_y = static_cast<double>(n) * g.cell_size;
  return g;
}

}  // namespace

void SynthWorldConfig::validate() const {
  for (double v : {lapse_rate, amp_day, amp_night, veg_cooling, sea_coupling, noise_sigma, sea_temperature, sea_decay_m}) {
    if (!std::isfinite(v)) throw ConfigError("synth: constants must be finite");
  }
  if (noise_sigma < 0.0) throw ConfigError("synth: noise_sigma must be >= 0");
  if (!(sea_decay_m > 0.0)) throw ConfigError("synth: sea_decay_m must be > 0");
  if (days < 1) throw ConfigError("synth: day count must be >= 1");
  if (domain < 32 || domain % 32 != 0) throw ConfigError("synth: domain must be a positive multiple of 32");
  if (sea_rows + 32 > domain) throw ConfigError("synth: sea band leaves no land");
  try {
    parse_date(start_date);
  } catch (const DataError& e) {
    throw ConfigError(std::string("synth: ") + e.what());
  }
}

nlohmann::json SynthWorldConfig::to_json() const {
  return {{"domain", domain},           {"seed", seed},
          {"lapse_rate", lapse_rate},   {"amp_day", amp_day},
          {"amp_night", amp_night},     {"veg_cooling", veg_cooling},
          {"sea_coupling", sea_coupling}, {"noise_sigma", noise_sigma},
          {"sea_temperature", sea_temperature}, {"start_date", start_date},
          {"days", days},               {"sea_rows", sea_rows},
          {"sea_decay_m", sea_decay_m}, {"urban_blobs", urban_blobs}};
}

SynthWorldConfig SynthWorldConfig::from_json(const nlohmann::json& j) {
  SynthWorldConfig c;
  ConfigReader r(j, "synth config");
  r.get("domain", c.domain);
  r.get("seed", c.seed);
  r.get("lapse_rate", c.lapse_rate);
  r.get("amp_day", c.amp_day);
  r.get("amp_night", c.amp_night);
  r.get("veg_cooling", c.veg_cooling);
  r.get("sea_coupling", c.sea_coupling);
  r.get("noise_sigma", c.noise_sigma);
  r.get("sea_temperature", c.sea_temperature);
  r.get("start_date", c.start_date);
  r.get("days", c.days);
  r.get("sea_rows", c.sea_rows);
  r.get("sea_decay_m", c.sea_decay_m);
  r.get("urban_blobs", c.urban_blobs);
  r.finish();
  c.validate();
  return c;
}

const std::array<WeatherTypeSpec, 12>& planted_weather_types() {
  static const std::array<WeatherTypeSpec, 12> types = {{
      {"winter-rain-westerly", -1.0, 4.0, 12.0, 6.0, 6.0, 270.0},
      {"winter-cold-northerly", -3.0, 5.0, 2.0, 4.0, 5.0, 0.0},
      {"winter-calm-clear", 0.0, 9.0, 0.0, 5.0, 1.5, 180.0},
      {"summer-dry-easterly", 3.0, 10.0, 0.0, 11.0, 1.72, 90.0},
      {"summer-humid-southerly", 2.0, 8.0, 0.5, 13.5, 3.0, 180.0},
      {"summer-storm-westerly", -1.0, 5.0, 15.0, 12.0, 6.0, 270.0},
      {"summer-marine-northerly", -1.5, 6.0, 1.0, 10.0, 4.0, 0.0},
      {"spring-showers", -0.5, 6.0, 6.0, 8.0, 4.0, 250.0},
      {"spring-fair-easterly", 1.0, 7.0, 0.2, 6.5, 2.5, 100.0},
      {"autumn-rain-southerly", 0.0, 5.0, 10.0, 9.0, 5.0, 190.0},
      {"autumn-fog-calm", 0.0, 3.0, 0.1, 10.0, 0.8, 0.0},
      {"autumn-fair-northerly", 0.5, 8.0, 0.0, 7.0, 3.0, 350.0},
  }};
  return types;
}

double diurnal_radiation(int hour) { return std::max(0.0, std::sin(kPi * (hour - 6) / 12.0)); }

double base_temperature(double t_mean, double amplitude, int hour) {
  return t_mean + 0.5 * amplitude * std::cos(2.0 * kPi * (hour - 15) / 24.0);
}

double synth_temperature(const SynthWorldConfig& c, double t_base, int hour, double elevation, double imperviousness,
                         LandCover lc, double sea_proximity) {
  const double rad = diurnal_radiation(hour);
  return t_base - c.lapse_rate * elevation + (c.amp_day * rad + c.amp_night * (1.0 - rad)) * imperviousness -
         (lc == LandCover::vegetation ? c.veg_cooling : 0.0) +
         c.sea_coupling * sea_proximity * (c.sea_temperature - t_base);
}

SynthWorld::SynthWorld(SynthWorldConfig config) : config_(std::move(config)) {
  config_.validate();
  build_terrain();
  build_weather();
}

void SynthWorld::build_terrain() {
  const std::size_t n = config_.domain;
  const double cell = 100.0;
  Rng rng(derive_seed(config_.seed, kTerrainStream));

  // Ridged multi-octave noise, smoothed, rising away from the coast.
  std::vector<double> relief(n * n, 0.0);
  double amp = 1.0;
  for (std::size_t octave = 128; octave >= 8; octave /= 2) {
    const auto noise = lattice_noise(n, std::min(octave, n), rng);
    for (std::size_t i = 0; i < relief.size(); ++i) {
      const double ridge = 1.0 - std::abs(2.0 * noise[i] - 1.0);
      relief[i] += amp * ridge * ridge;
    }
    amp *= 0.5;
  }
  box_blur(relief, n);
  box_blur(relief, n);
  const double lo = *std::min_element(relief.begin(), relief.end());
  for (std::size_t y = 0; y < n; ++y) {
    const double coast = smoothstep(0.0, 80.0, static_cast<double>(y) - static_cast<double>(config_.sea_rows));
    for (std::size_t x = 0; x < n; ++x) relief[y * n + x] = (relief[y * n + x] - lo) * coast;
  }
  const double hi = *std::max_element(relief.begin(), relief.end());

  layers_.elevation = make_grid(n, Units::meters);
  layers_.imperviousness = make_grid(n, Units::fraction);
  layers_.landcover = make_grid(n, Units::category);
  sea_proximity_ = make_grid(n, Units::fraction);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const bool sea = y < config_.sea_rows;
      layers_.elevation.at(x, y) = sea ? 0.0F : static_cast<float>(1000.0 * relief[y * n + x] / hi);
      const double dist = sea ? 0.0 : static_cast<double>(y - config_.sea_rows + 1) * cell;
      sea_proximity_.at(x, y) = static_cast<float>(std::exp(-dist / config_.sea_decay_m));
    }
  }

  // Urban blobs preferentially in low terrain.
  struct Blob {
    double cx, cy, sigma, peak;
    bool industrial;
  };
  Rng urng(derive_seed(config_.seed, kUrbanStream));
  std::vector<Blob> blobs;
  for (int attempt = 0; attempt < 100000 && blobs.size() < config_.urban_blobs; ++attempt) {
    const double cx = urng.uniform(4.0, static_cast<double>(n) - 4.0);
    const double cy = urng.uniform(static_cast<double>(config_.sea_rows) + 4.0, static_cast<double>(n) - 4.0);
    const double e = layers_.elevation.at(static_cast<std::size_t>(cx), static_cast<std::size_t>(cy));
    const double accept = std::pow(1.0 - e / 1000.0, 4.0);
    if (urng.uniform() >= accept) continue;
    Blob b;
    b.cx = cx;
    b.cy = cy;
    b.sigma = urng.uniform(5.0, 14.0);
    b.peak = urng.uniform(0.7, 1.0);
    b.industrial = urng.uniform() < 0.3;
    blobs.push_back(b);
  }
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double jitter = urng.uniform();
      if (y < config_.sea_rows) {
        layers_.imperviousness.at(x, y) = 0.0F;
        layers_.landcover.at(x, y) = static_cast<float>(LandCover::water);
        continue;
      }
      double open = 1.0;
      double strongest = 0.0;
      bool industrial = false;
      for (const auto& b : blobs) {
        const double dx = static_cast<double>(x) - b.cx;
        const double dy = static_cast<double>(y) - b.cy;
        const double w = b.peak * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
        open *= 1.0 - w;
        if (w > strongest) {
          strongest = w;
          industrial = b.industrial;
        }
      }
      const double imperv = std::clamp(1.0 - open + 0.04 * jitter, 0.0, 1.0);
      layers_.imperviousness.at(x, y) = static_cast<float>(imperv);
      LandCover lc = LandCover::vegetation;
      if (imperv >= 0.5 && industrial) {
        lc = LandCover::industrial;
      } else if (imperv >= 0.35) {
        lc = LandCover::urban;
      }
      layers_.landcover.at(x, y) = static_cast<float>(lc);
    }
  }
}

void SynthWorld::build_weather() {
  const auto& types = planted_weather_types();
  const Date start = parse_date(config_.start_date);
  days_.clear();
  std::vector<MetRecord> rows;
  rows.reserve(static_cast<std::size_t>(config_.days) * 24);
  int previous = -1;
  for (int i = 0; i < config_.days; ++i) {
    Rng rng(derive_seed(config_.seed, kWeatherStream, static_cast<std::uint64_t>(i)));
    SynthDay day;
    day.date = start + std::chrono::days{i};
    const auto& weights = kSeasonWeights[static_cast<std::size_t>(season_of(day.date))];
    // Regimes persist: half the time yesterday's type carries over when the season allows it.
    const bool keep = previous >= 0 && weights[static_cast<std::size_t>(previous)] > 0.0 && rng.uniform() < 0.5;
    int type = previous;
    const double pick = rng.uniform();
    if (!keep) {
      double acc = 0.0;
      type = 0;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] <= 0.0) continue;
        type = static_cast<int>(k);
        acc += weights[k];
        if (pick < acc) break;
      }
    }
    previous = type;
    const auto& spec = types[static_cast<std::size_t>(type)];
    const double doy = day_of_year(day.date);
    const double climate = 14.0 + 7.0 * std::sin(2.0 * kPi * (doy - 105.0) / 365.25);
    day.weather_type = type;
    day.t_mean = climate + spec.t_offset + rng.normal(0.0, 1.0);
    day.amplitude = std::max(1.0, spec.amplitude + rng.normal(0.0, 0.7));
    const double precip_total = spec.precip > 0.0 ? spec.precip * rng.uniform(0.6, 1.4) : 0.0;
    const double q_mean = spec.humidity + rng.normal(0.0, 0.4);
    const double speed = std::max(0.3, spec.wind_speed + rng.normal(0.0, 0.2));
    const double from = (spec.wind_from + rng.normal(0.0, 8.0)) * kPi / 180.0;
    const double u_mean = -speed * std::sin(from);
    const double v_mean = -speed * std::cos(from);

    std::array<double, 24> rain_weight{};
    double rain_sum = 0.0;
    for (auto& w : rain_weight) {
      const double r = rng.uniform();
      w = r * r;
      rain_sum += w;
    }
    for (int h = 0; h < 24; ++h) {
      MetRecord rec;
      rec.time = hour_stamp(day.date, h);
      rec.t2m = base_temperature(day.t_mean, day.amplitude, h);
      rec.precip = precip_total > 0.0 ? precip_total * rain_weight[static_cast<std::size_t>(h)] / rain_sum : 0.0;
      rec.q = q_mean + 0.3 * std::sin(2.0 * kPi * (h - 9) / 24.0);
      rec.u10 = u_mean + rng.normal(0.0, 0.3);
      rec.v10 = v_mean + rng.normal(0.0, 0.3);
      rows.push_back(rec);
    }
    days_.push_back(day);
  }
  met_ = MetSeries(std::move(rows));
}

std::vector<Date> SynthWorld::dates() const {
  std::vector<Date> out;
  out.reserve(days_.size());
  for (const auto& d : days_) out.push_back(d.date);
  return out;
}

const SynthDay& SynthWorld::day(Date d) const {
  const auto offset = (d - days_.front().date).count();
  if (offset < 0 || offset >= static_cast<long>(days_.size())) {
    throw DataError("synthetic world has no day " + format_date(d));
  }
  return days_[static_cast<std::size_t>(offset)];
}

double SynthWorld::t_base(Date d, int hour) const {
  const SynthDay& sd = day(d);
  return base_temperature(sd.t_mean, sd.amplitude, hour);
}

RasterGrid SynthWorld::oracle(Date d, int hour, bool noise) const {
  if (hour < 0 || hour > 23) throw DataError("oracle hour out of range: " + std::to_string(hour));
  const double tb = t_base(d, hour);
  const std::size_t n = config_.domain;
  RasterGrid g = make_grid(n, Units::celsius);
  const bool with_noise = noise && config_.noise_sigma > 0.0;
  Rng rng(derive_seed(config_.seed, kNoiseStream, static_cast<std::uint64_t>(hour_stamp(d, hour))));
  for (std::size_t i = 0; i < n * n; ++i) {
    const auto lc = static_cast<LandCover>(static_cast<int>(layers_.landcover.values[i]));
    double t = synth_temperature(config_, tb, hour, layers_.elevation.values[i], layers_.imperviousness.values[i], lc,
                                 sea_proximity_.values[i]);
    if (with_noise) t += rng.normal(0.0, config_.noise_sigma);
    g.values[i] = static_cast<float>(t);
  }
  return g;
}

TargetProvider SynthWorld::provider(bool noise) const {
  return [this, noise](Date d, int hour) { return oracle(d, hour, noise); };
}

}  // namespace uhinet::data
