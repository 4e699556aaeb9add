#pragma once

#include <functional>
#include <vector>

#include "json.hpp"
#include "uhinet/datapipe/examples.hpp"
#include "uhinet/datapipe/raster.hpp"
#include "uhinet/numerics/optim.hpp"
#include "uhinet/unet/model.hpp"

namespace uhinet::unet {

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  std::size_t steps = 0;
  double train_loss = 0.0;  // mean squared error, normalized units
  double val_loss = 0.0;    // NaN without a validation set
  double seconds = 0.0;     // wall clock; ignored by comparisons

  bool operator==(const EpochStats& o) const {
    const bool val_eq = (val_loss == o.val_loss) || (std::isnan(val_loss) && std::isnan(o.val_loss));
    return epoch == o.epoch && steps == o.steps && train_loss == o.train_loss && val_eq;
  }
};

struct TrainHistory {
  std::vector<EpochStats> epochs;

  nlohmann::json to_json(bool with_timing = false) const;
  bool operator==(const TrainHistory&) const = default;
};

// Everything besides the weights needed to resume training bit-exactly.
struct TrainerState {
  num::AdamState<float> adam;
  std::size_t epoch = 0;  // completed epochs
  std::int64_t step = 0;  // optimizer steps taken
  Rng rng = Rng(0);

  static TrainerState fresh(const UNet& model);
  bool operator==(const TrainerState&) const = default;
};

struct Batch {
  num::Tensor spatial;  // (B, S, S, C)
  num::Tensor met;      // (B, steps, vars)
  num::Tensor target;   // (B, S, S, 1)
};

Batch make_batch(const std::vector<data::TrainingExample>& examples, std::span<const std::size_t> indices);

struct TrainOptions {
  std::function<void(const EpochStats&)> on_epoch;
};

// Runs the remaining epochs (config.epochs - state.epoch) with the optimizer,
// learning rate and batch size from the model config; one seeded shuffle per
// epoch. On a non-finite loss or gradient the model and state are rolled back
// to the start of the failing epoch and NumericError is thrown.
TrainHistory train(UNet& model, TrainerState& state, const std::vector<data::TrainingExample>& train_set,
                   const std::vector<data::TrainingExample>& val_set, const TrainOptions& options = {});

// Mean squared error (normalized units) with dropout off.
double evaluate_loss(const UNet& model, const std::vector<data::TrainingExample>& examples,
                     std::size_t batch_size = 64);

// Predicted patch in degrees Celsius.
data::RasterGrid predict_denormalized(const UNet& model, const num::Tensor& spatial, const num::Tensor& met,
                                      const data::NormalizationManifest& manifest);

}  // namespace uhinet::unet
