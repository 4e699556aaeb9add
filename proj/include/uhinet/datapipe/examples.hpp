#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "uhinet/datapipe/met.hpp"
#include "uhinet/datapipe/normalization.hpp"
#include "uhinet/datapipe/patches.hpp"
#include "uhinet/datapipe/raster.hpp"
#include "uhinet/numerics/tensor.hpp"

namespace uhinet::data {

inline constexpr std::size_t kSpatialChannels = 3;  // imperviousness, elevation, land cover
inline constexpr std::size_t kMetSteps = 3;         // hours t-2, t-1, t

struct SpatialLayers {
  RasterGrid imperviousness;  // fraction
  RasterGrid elevation;       // meters
  RasterGrid landcover;       // LandCover codes

  // Equal shapes, no nodata, imperviousness in [0,1], codes in palette.
  void validate() const;
  std::size_t width() const { return imperviousness.width; }
  std::size_t height() const { return imperviousness.height; }
};

// (size, size, 3) normalized input for the window at (row0, col0).
num::Tensor spatial_tensor(const SpatialLayers& layers, std::size_t row0, std::size_t col0, std::size_t size,
                           const NormalizationManifest& manifest);

// (3, 5) normalized met window for hours t-2..t, rows oldest first.
num::Tensor met_window(const MetSeries& met, HourStamp t, const NormalizationManifest& manifest);
num::Tensor met_window(const std::array<MetRecord, kMetSteps>& rows, const NormalizationManifest& manifest);

// (size, size, 1) normalized target cut from a full-domain grid.
num::Tensor target_tensor(const RasterGrid& grid, std::size_t row0, std::size_t col0, std::size_t size,
                          const NormalizationManifest& manifest);

struct TrainingExample {
  int patch_id = 0;
  int day_id = 0;  // position in the assembly's day list
  Date date{};
  int hour = 0;
  std::shared_ptr<const num::Tensor> spatial;  // shared by every hour of a patch
  num::Tensor met;
  num::Tensor target;
};

// Full-domain T_a grid for (date, hour); throws DataError when unavailable.
using TargetProvider = std::function<RasterGrid(Date, int)>;

// |patches| * |days| * 24 examples ordered by (patch, day, hour).
std::vector<TrainingExample> assemble_examples(const std::vector<PatchIndex>& patches, const SpatialLayers& layers,
                                               const MetSeries& met, const TargetProvider& targets,
                                               const std::vector<Date>& days, const NormalizationManifest& manifest);

void shuffle_examples(std::vector<TrainingExample>& examples, std::uint64_t seed);

// Manifest for one training run: spatial and target ranges over the training
// patches (and training days for T_a), met ranges over the whole met record.
NormalizationManifest fit_training_manifest(const SpatialLayers& layers, const std::vector<PatchIndex>& train_patches,
                                            const MetSeries& met, const TargetProvider& targets,
                                            const std::vector<Date>& days);

}  // namespace uhinet::data
