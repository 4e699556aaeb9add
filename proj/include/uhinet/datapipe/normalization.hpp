#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace uhinet::data {

// Canonical variable names used as manifest keys.
namespace var {
inline constexpr const char* imperviousness = "imperviousness";
inline constexpr const char* elevation = "elevation";
inline constexpr const char* t2m = "t2m";
inline constexpr const char* precip = "precip";
inline constexpr const char* humidity = "q";
inline constexpr const char* u10 = "u10";
inline constexpr const char* v10 = "v10";
inline constexpr const char* target = "t_a";
}  // namespace var

struct VariableRange {
  double min = 0.0;
  double max = 1.0;
  bool operator==(const VariableRange&) const = default;
};

// x -> 2 (x - min) / (max - min) - 1
inline double normalize(double x, const VariableRange& r) { return 2.0 * (x - r.min) / (r.max - r.min) - 1.0; }
inline double denormalize(double xn, const VariableRange& r) { return (xn + 1.0) / 2.0 * (r.max - r.min) + r.min; }

// Exact min/max over the supplied samples. Throws DataError for empty or
// single-valued input, or non-finite samples.
VariableRange fit_range(std::span<const std::span<const float>> chunks, const std::string& name);
VariableRange fit_range(std::span<const float> values, const std::string& name);

class NormalizationManifest {
 public:
  void set(const std::string& name, VariableRange r);
  // Throws ConfigError when the variable is absent.
  const VariableRange& at(const std::string& name) const;
  bool contains(const std::string& name) const { return ranges_.count(name) != 0; }
  const std::map<std::string, VariableRange>& ranges() const { return ranges_; }

  nlohmann::json to_json() const;
  static NormalizationManifest from_json(const nlohmann::json& j);

  bool operator==(const NormalizationManifest&) const = default;

 private:
  std::map<std::string, VariableRange> ranges_;
};

// Per-variable sample chunks -> manifest; the caller decides which samples
// (training split only) go in.
NormalizationManifest normalize_fit(const std::map<std::string, std::vector<std::span<const float>>>& samples);

// Fixed ordinal anchors for the categorical land-cover layer.
enum class LandCover : int { water = 0, vegetation = 1, urban = 2, industrial = 3 };

bool valid_landcover_code(double code);
float landcover_anchor(LandCover lc);
float landcover_anchor_code(double code);  // throws DataError for codes outside the palette

}  // namespace uhinet::data
