#pragma once

#include <array>
#include <vector>

#include "uhinet/datapipe/examples.hpp"
#include "uhinet/unet/model.hpp"

namespace uhinet::unet {

// Raw met window, rows t-2..t, columns t2m, precip, q, u10, v10.
using MetWindow = std::array<std::array<double, data::kMetVars>, data::kMetSteps>;

MetWindow met_window_rows(const data::MetSeries& met, data::HourStamp t);

// One patch from raw layers (each input_size x input_size) and a raw met
// window, returned in degrees Celsius. Dropout is off.
data::RasterGrid predict_patch(const UNet& model, const data::NormalizationManifest& manifest,
                               const data::SpatialLayers& patch, const MetWindow& met);

// Full-domain grids for each hour of `day`: predicted patches filled in,
// everything else nodata.
std::vector<data::RasterGrid> predict_day(const UNet& model, const data::NormalizationManifest& manifest,
                                          const data::SpatialLayers& layers, const data::MetSeries& met,
                                          const std::vector<data::PatchIndex>& patches, data::Date day);

}  // namespace uhinet::unet
