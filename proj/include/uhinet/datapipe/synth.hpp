#pragma once

// Deterministic synthetic city: terrain, urban fabric, a coastline, an hourly
// met record driven by planted daily weather types, and a closed-form hourly
// air-temperature field used as ground truth.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "uhinet/datapipe/examples.hpp"

namespace uhinet::data {

struct SynthWorldConfig {
  std::size_t domain = 256;  // pixels per side
  std::uint64_t seed = 42;
  double lapse_rate = 0.0065;     // degC per m
  double amp_day = 3.0;           // degC of urban excess at full sun
  double amp_night = 2.0;         // degC of urban excess at night
  double veg_cooling = 1.0;       // degC
  double sea_coupling = 0.5;      // weight of the sea-temperature pull
  double noise_sigma = 0.1;       // degC
  double sea_temperature = 20.0;  // degC
  std::string start_date = "2015-01-01";
  int days = 730;
  std::size_t sea_rows = 24;   // water band along the northern edge
  double sea_decay_m = 800.0;  // e-folding distance of the sea influence
  std::size_t urban_blobs = 10;

  // Throws ConfigError on non-finite constants, days < 1, or a bad domain.
  void validate() const;
  nlohmann::json to_json() const;
  static SynthWorldConfig from_json(const nlohmann::json& j);
};

struct WeatherTypeSpec {
  const char* name;
  double t_offset;     // degC added to the seasonal mean
  double amplitude;    // degC, daily max - min of T_base
  double precip;       // mm/day
  double humidity;     // g/kg
  double wind_speed;   // m/s
  double wind_from;    // meteorological degrees
};

// The twelve planted daily regimes; index kTargetWeatherType is the dry,
// humid, weak-easterly summer type.
const std::array<WeatherTypeSpec, 12>& planted_weather_types();
inline constexpr int kTargetWeatherType = 3;

struct SynthDay {
  Date date{};
  int weather_type = 0;
  double t_mean = 0.0;
  double amplitude = 0.0;
};

// max(0, sin(pi (t - 6) / 12))
double diurnal_radiation(int hour);

// T_mean + Amp/2 cos(2 pi (t - 15) / 24)
double base_temperature(double t_mean, double amplitude, int hour);

// Noise-free oracle temperature at one pixel.
double synth_temperature(const SynthWorldConfig& c, double t_base, int hour, double elevation, double imperviousness,
                         LandCover lc, double sea_proximity);

class SynthWorld {
 public:
  explicit SynthWorld(SynthWorldConfig config);

  const SynthWorldConfig& config() const { return config_; }
  const SpatialLayers& layers() const { return layers_; }
  const RasterGrid& sea_proximity() const { return sea_proximity_; }
  const MetSeries& met() const { return met_; }
  const std::vector<SynthDay>& days() const { return days_; }
  std::vector<Date> dates() const;

  // Throws DataError for dates outside the simulated record.
  const SynthDay& day(Date d) const;
  double t_base(Date d, int hour) const;

  RasterGrid oracle(Date d, int hour, bool noise = true) const;
  // Provider over oracle(); the world must outlive it.
  TargetProvider provider(bool noise = true) const;

 private:
  void build_terrain();
  void build_weather();

  SynthWorldConfig config_;
  SpatialLayers layers_;
  RasterGrid sea_proximity_;
  std::vector<SynthDay> days_;
  MetSeries met_;
};

}  // namespace uhinet::data
