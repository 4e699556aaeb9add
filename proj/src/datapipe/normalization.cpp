#include "uhinet/datapipe/normalization.hpp"

#include <cmath>
#include <limits>

#include "uhinet/errors.hpp"

namespace uhinet::data {

VariableRange fit_range(std::span<const std::span<const float>> chunks, const std::string& name) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (auto chunk : chunks) {
    for (float v : chunk) {
      if (!std::isfinite(v)) throw DataError("normalization: non-finite sample for '" + name + "'");
      lo = std::min(lo, static_cast<double>(v));
      hi = std::max(hi, static_cast<double>(v));
      ++count;
    }
  }
  if (count == 0) throw DataError("normalization: no samples for '" + name + "'");
  if (!(hi > lo)) throw DataError("normalization: degenerate range for '" + name + "' (single distinct value)");
  return {lo, hi};
}

VariableRange fit_range(std::span<const float> values, const std::string& name) {
  const std::span<const float> one[] = {values};
  return fit_range(std::span<const std::span<const float>>(one), name);
}

void NormalizationManifest::set(const std::string& name, VariableRange r) {
  if (!(r.max > r.min) || !std::isfinite(r.min) || !std::isfinite(r.max)) {
    throw DataError("normalization: invalid range for '" + name + "'");
  }
  ranges_[name] = r;
}

const VariableRange& NormalizationManifest::at(const std::string& name) const {
  auto it = ranges_.find(name);
  if (it == ranges_.end()) throw ConfigError("normalization manifest has no entry for '" + name + "'");
  return it->second;
}

nlohmann::json NormalizationManifest::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, r] : ranges_) j[name] = {{"min", r.min}, {"max", r.max}};
  return j;
}

NormalizationManifest NormalizationManifest::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("normalization manifest must be a JSON object");
  NormalizationManifest m;
  try {
    for (const auto& [name, r] : j.items()) m.set(name, {r.at("min").get<double>(), r.at("max").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("normalization manifest: ") + e.what());
  } catch (const DataError& e) {
    throw FormatError(e.what());
  }
  return m;
}

NormalizationManifest normalize_fit(const std::map<std::string, std::vector<std::span<const float>>>& samples) {
  NormalizationManifest m;
  for (const auto& [name, chunks] : samples) m.set(name, fit_range(chunks, name));
  return m;
}

bool valid_landcover_code(double code) {
  return code == 0.0 || code == 1.0 || code == 2.0 || code == 3.0;
}

float landcover_anchor(LandCover lc) {
  switch (lc) {
    case LandCover::water: return -1.0F;
    case LandCover::vegetation: return -0.33F;
    case LandCover::urban: return 0.33F;
    case LandCover::industrial: return 1.0F;
  }
  throw DataError("unknown land-cover class");
}

float landcover_anchor_code(double code) {
  if (!valid_landcover_code(code)) throw DataError("land-cover code " + std::to_string(code) + " outside palette 0..3");
  return landcover_anchor(static_cast<LandCover>(static_cast<int>(code)));
}

}  // namespace uhinet::data
