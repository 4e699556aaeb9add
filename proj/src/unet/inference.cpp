#include "uhinet/unet/inference.hpp"

#include "uhinet/errors.hpp"
#include "uhinet/unet/train.hpp"

namespace uhinet::unet {

MetWindow met_window_rows(const data::MetSeries& met, data::HourStamp t) {
  MetWindow w{};
  for (std::size_t s = 0; s < data::kMetSteps; ++s) {
    w[s] = met.at(t - static_cast<data::HourStamp>(data::kMetSteps - 1 - s)).values();
  }
  return w;
}

namespace {

num::Tensor normalized_met(const MetWindow& met, const data::NormalizationManifest& manifest) {
  std::array<data::MetRecord, data::kMetSteps> rows{};
  for (std::size_t s = 0; s < data::kMetSteps; ++s) {
    rows[s].t2m = met[s][0];
    rows[s].precip = met[s][1];
    rows[s].q = met[s][2];
    rows[s].u10 = met[s][3];
    rows[s].v10 = met[s][4];
  }
  return data::met_window(rows, manifest);
}

}  // namespace

data::RasterGrid predict_patch(const UNet& model, const data::NormalizationManifest& manifest,
                               const data::SpatialLayers& patch, const MetWindow& met) {
  const std::size_t n = model.config().input_size;
  patch.validate();
  if (patch.width() != n || patch.height() != n) {
    throw DimensionError("predict_patch: layers must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  const num::Tensor spatial = data::spatial_tensor(patch, 0, 0, n, manifest);
  return predict_denormalized(model, spatial, normalized_met(met, manifest), manifest);
}

std::vector<data::RasterGrid> predict_day(const UNet& model, const data::NormalizationManifest& manifest,
                                          const data::SpatialLayers& layers, const data::MetSeries& met,
                                          const std::vector<data::PatchIndex>& patches, data::Date day) {
  layers.validate();
  const auto& range = manifest.at(data::var::target);
  const std::size_t n = model.config().input_size;
  std::vector<num::Tensor> spatial;
  for (const auto& p : patches) {
    if (p.size != n) throw DimensionError("predict_day: patch size differs from the model input size");
    spatial.push_back(data::spatial_tensor(layers, p.row0, p.col0, n, manifest));
  }
  std::vector<data::RasterGrid> out;
  for (int h = 0; h < 24; ++h) {
    data::RasterGrid g = data::RasterGrid::filled(layers.width(), layers.height(), data::Units::celsius);
    g.cell_size = layers.imperviousness.cell_size;
    g.origin_x = layers.imperviousness.origin_x;
    g.origin_y = layers.imperviousness.origin_y;
    g.nodata.assign(g.values.size(), 1);
    const num::Tensor window = data::met_window(met, data::hour_stamp(day, h), manifest);
    for (std::size_t k = 0; k < patches.size(); ++k) {
      const num::Tensor y = model.predict(spatial[k], window);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
          const std::size_t i = (patches[k].row0 + r) * g.width + patches[k].col0 + c;
          g.values[i] = static_cast<float>(data::denormalize(y[r * n + c], range));
          g.nodata[i] = 0;
        }
      }
    }
    if (!g.has_nodata()) g.nodata.clear();
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace uhinet::unet
