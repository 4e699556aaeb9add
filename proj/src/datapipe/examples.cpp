#include "uhinet/datapipe/examples.hpp"

#include <cmath>
#include <limits>

#include "uhinet/errors.hpp"
#include "uhinet/rng.hpp"

namespace uhinet::data {

void SpatialLayers::validate() const {
  for (const RasterGrid* g : {&imperviousness, &elevation, &landcover}) {
    g->validate();
    if (g->width != imperviousness.width || g->height != imperviousness.height) {
      throw DataError("spatial layers differ in shape");
    }
    if (g->has_nodata()) throw DataError("spatial layers must not contain nodata cells");
  }
  for (float v : imperviousness.values) {
    if (!(v >= 0.0F && v <= 1.0F)) throw DataError("imperviousness outside [0,1]: " + std::to_string(v));
  }
  for (float v : elevation.values) {
    if (!std::isfinite(v)) throw DataError("non-finite elevation");
  }
  for (float v : landcover.values) {
    if (!valid_landcover_code(v)) throw DataError("land-cover code outside palette: " + std::to_string(v));
  }
}

num::Tensor spatial_tensor(const SpatialLayers& layers, std::size_t row0, std::size_t col0, std::size_t size,
                           const NormalizationManifest& manifest) {
  if (row0 + size > layers.height() || col0 + size > layers.width()) {
    throw DimensionError("spatial window outside the domain");
  }
  const auto& ri = manifest.at(var::imperviousness);
  const auto& re = manifest.at(var::elevation);
  num::Tensor t({size, size, kSpatialChannels});
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const std::size_t o = (y * size + x) * kSpatialChannels;
      t[o] = static_cast<float>(normalize(layers.imperviousness.at(col0 + x, row0 + y), ri));
      t[o + 1] = static_cast<float>(normalize(layers.elevation.at(col0 + x, row0 + y), re));
      t[o + 2] = landcover_anchor_code(layers.landcover.at(col0 + x, row0 + y));
    }
  }
  return t;
}

num::Tensor met_window(const std::array<MetRecord, kMetSteps>& rows, const NormalizationManifest& manifest) {
  const auto& names = met_variable_names();
  num::Tensor t({kMetSteps, kMetVars});
  for (std::size_t s = 0; s < kMetSteps; ++s) {
    const auto v = rows[s].values();
    for (std::size_t k = 0; k < kMetVars; ++k) {
      t[s * kMetVars + k] = static_cast<float>(normalize(v[k], manifest.at(names[k])));
    }
  }
  return t;
}

num::Tensor met_window(const MetSeries& met, HourStamp t, const NormalizationManifest& manifest) {
  std::array<MetRecord, kMetSteps> rows;
  for (std::size_t s = 0; s < kMetSteps; ++s) {
    rows[s] = met.at(t - static_cast<HourStamp>(kMetSteps - 1 - s));
  }
  return met_window(rows, manifest);
}

num::Tensor target_tensor(const RasterGrid& grid, std::size_t row0, std::size_t col0, std::size_t size,
                          const NormalizationManifest& manifest) {
  if (row0 + size > grid.height || col0 + size > grid.width) throw DimensionError("target window outside the grid");
  const auto& r = manifest.at(var::target);
  num::Tensor t({size, size, 1});
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      if (grid.is_nodata(col0 + x, row0 + y)) {
        throw DataError("target grid has nodata at pixel (" + std::to_string(col0 + x) + "," +
                        std::to_string(row0 + y) + ")");
      }
      t[y * size + x] = static_cast<float>(normalize(grid.at(col0 + x, row0 + y), r));
    }
  }
  return t;
}

std::vector<TrainingExample> assemble_examples(const std::vector<PatchIndex>& patches, const SpatialLayers& layers,
                                               const MetSeries& met, const TargetProvider& targets,
                                               const std::vector<Date>& days, const NormalizationManifest& manifest) {
  layers.validate();
  std::vector<std::shared_ptr<const num::Tensor>> spatial;
  spatial.reserve(patches.size());
  for (const auto& p : patches) {
    spatial.push_back(std::make_shared<const num::Tensor>(spatial_tensor(layers, p.row0, p.col0, p.size, manifest)));
  }
  std::vector<TrainingExample> out(patches.size() * days.size() * 24);
  for (std::size_t d = 0; d < days.size(); ++d) {
    for (int h = 0; h < 24; ++h) {
      const HourStamp t = hour_stamp(days[d], h);
      num::Tensor window;
      try {
        window = met_window(met, t, manifest);
      } catch (const DataError& e) {
        throw DataError("examples: met window for " + format_timestamp(t) + " incomplete: " + e.what());
      }
      const RasterGrid grid = targets(days[d], h);
      if (grid.width != layers.width() || grid.height != layers.height()) {
        throw DataError("examples: target grid for " + format_timestamp(t) + " does not match the domain");
      }
      for (std::size_t p = 0; p < patches.size(); ++p) {
        TrainingExample& ex = out[(p * days.size() + d) * 24 + static_cast<std::size_t>(h)];
        ex.patch_id = patches[p].id;
        ex.day_id = static_cast<int>(d);
        ex.date = days[d];
        ex.hour = h;
        ex.spatial = spatial[p];
        ex.met = window;
        try {
          ex.target = target_tensor(grid, patches[p].row0, patches[p].col0, patches[p].size, manifest);
        } catch (const DataError& e) {
          throw DataError("examples: target for patch " + std::to_string(patches[p].id) + " at " +
                          format_timestamp(t) + ": " + e.what());
        }
      }
    }
  }
  return out;
}

void shuffle_examples(std::vector<TrainingExample>& examples, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xe8a3));
  rng.shuffle(examples.begin(), examples.end());
}

NormalizationManifest fit_training_manifest(const SpatialLayers& layers, const std::vector<PatchIndex>& train_patches,
                                            const MetSeries& met, const TargetProvider& targets,
                                            const std::vector<Date>& days) {
  if (train_patches.empty()) throw DataError("manifest: no training patches");
  if (days.empty()) throw DataError("manifest: no training days");
  std::vector<float> imperv, elev;
  for (const auto& p : train_patches) {
    for (std::size_t y = p.row0; y < p.row0 + p.size; ++y) {
      for (std::size_t x = p.col0; x < p.col0 + p.size; ++x) {
        imperv.push_back(layers.imperviousness.at(x, y));
        elev.push_back(layers.elevation.at(x, y));
      }
    }
  }
  NormalizationManifest m;
  m.set(var::imperviousness, fit_range(imperv, var::imperviousness));
  m.set(var::elevation, fit_range(elev, var::elevation));

  const auto& names = met_variable_names();
  for (std::size_t k = 0; k < kMetVars; ++k) {
    std::vector<float> v;
    v.reserve(met.size());
    for (const auto& r : met.rows()) v.push_back(static_cast<float>(r.values()[k]));
    m.set(names[k], fit_range(v, names[k]));
  }

  float lo = std::numeric_limits<float>::infinity();
  float hi = -std::numeric_limits<float>::infinity();
  for (Date d : days) {
    for (int h = 0; h < 24; ++h) {
      const RasterGrid g = targets(d, h);
      for (const auto& p : train_patches) {
        for (std::size_t y = p.row0; y < p.row0 + p.size; ++y) {
          for (std::size_t x = p.col0; x < p.col0 + p.size; ++x) {
            if (g.is_nodata(x, y)) continue;
            const float v = g.at(x, y);
            if (!std::isfinite(v)) throw DataError("manifest: non-finite target value");
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        }
      }
    }
  }
  if (!(hi > lo)) throw DataError("manifest: degenerate target range");
  m.set(var::target, {lo, hi});
  return m;
}

}  // namespace uhinet::data
