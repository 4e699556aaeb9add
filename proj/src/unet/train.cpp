#include "uhinet/unet/train.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>

#include "uhinet/errors.hpp"

namespace uhinet::unet {

namespace {
constexpr std::uint64_t kTrainStream = 0x7a1d;
}

nlohmann::json TrainHistory::to_json(bool with_timing) const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : epochs) {
    nlohmann::json row = {{"epoch", e.epoch}, {"steps", e.steps}, {"train_loss", e.train_loss}};
    row["val_loss"] = std::isnan(e.val_loss) ? nlohmann::json(nullptr) : nlohmann::json(e.val_loss);
    if (with_timing) row["seconds"] = e.seconds;
    rows.push_back(row);
  }
  return rows;
}

TrainerState TrainerState::fresh(const UNet& model) {
  TrainerState s;
  s.adam = num::AdamState<float>::zeros_like(model.parameters());
  s.rng = Rng(derive_seed(model.config().seed, kTrainStream));
  return s;
}

Batch make_batch(const std::vector<data::TrainingExample>& examples, std::span<const std::size_t> indices) {
  if (indices.empty()) throw UsageError("make_batch: empty batch");
  const auto& first = examples.at(indices[0]);
  num::Shape xs = first.spatial->shape();
  num::Shape ms = first.met.shape();
  num::Shape ts = first.target.shape();
  const std::size_t nx = first.spatial->size();
  const std::size_t nm = first.met.size();
  const std::size_t nt = first.target.size();
  const std::size_t b = indices.size();
  xs.insert(xs.begin(), b);
  ms.insert(ms.begin(), b);
  ts.insert(ts.begin(), b);
  Batch out{num::Tensor(xs), num::Tensor(ms), num::Tensor(ts)};
  for (std::size_t i = 0; i < b; ++i) {
    const auto& ex = examples.at(indices[i]);
    if (ex.spatial->size() != nx || ex.met.size() != nm || ex.target.size() != nt) {
      throw DimensionError("make_batch: examples differ in shape");
    }
    std::memcpy(out.spatial.data().data() + i * nx, ex.spatial->data().data(), nx * sizeof(float));
    std::memcpy(out.met.data().data() + i * nm, ex.met.data().data(), nm * sizeof(float));
    std::memcpy(out.target.data().data() + i * nt, ex.target.data().data(), nt * sizeof(float));
  }
  return out;
}

TrainHistory train(UNet& model, TrainerState& state, const std::vector<data::TrainingExample>& train_set,
                   const std::vector<data::TrainingExample>& val_set, const TrainOptions& options) {
  const UNetConfig& cfg = model.config();
  if (train_set.empty()) throw UsageError("train: empty training set");
  if (cfg.batch_size > train_set.size()) {
    throw ConfigError("train: batch_size " + std::to_string(cfg.batch_size) + " exceeds the " +
                      std::to_string(train_set.size()) + " training examples");
  }
  if (cfg.optimizer == OptimizerKind::adam && state.adam.m.size() != model.parameters().size()) {
    state.adam = num::AdamState<float>::zeros_like(model.parameters());
  }
  const num::AdamOptions adam{cfg.lr, 0.9, 0.999, 1e-8};
  const std::size_t n_params = model.parameters().size();

  TrainHistory history;
  std::vector<std::size_t> order(train_set.size());
  while (state.epoch < cfg.epochs) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto snapshot_params = model.parameters();
    const TrainerState snapshot_state = state;
    auto diverged = [&](const std::string& what) {
      model.parameters() = snapshot_params;
      state = snapshot_state;
      throw NumericError("train: " + what + " in epoch " + std::to_string(state.epoch + 1) +
                         "; rolled back to the start of the epoch");
    };

    std::iota(order.begin(), order.end(), std::size_t{0});
    state.rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      Batch batch = make_batch(train_set, std::span(order).subspan(start, len));
      num::GradTape<float> tape;
      auto x = tape.input(std::move(batch.spatial));
      auto m = tape.input(std::move(batch.met));
      auto y = tape.input(std::move(batch.target));
      auto pred = model.forward(tape, x, m, true, state.rng);
      auto loss = num::mse_loss(tape, pred, y);
      const double loss_value = tape.value(loss).item();
      if (!std::isfinite(loss_value)) diverged("non-finite loss");
      auto grads = tape.backward(loss, n_params);
      for (const auto& g : grads) {
        if (!g.all_finite()) diverged("non-finite gradient");
      }
      if (cfg.optimizer == OptimizerKind::adam) {
        num::adam_step<float>(model.parameters(), grads, state.adam, adam);
      } else {
        num::sgd_step<float>(model.parameters(), grads, cfg.lr);
      }
      ++state.step;
      ++steps;
      loss_sum += loss_value * static_cast<double>(len);
    }
    ++state.epoch;
    EpochStats stats;
    stats.epoch = state.epoch;
    stats.steps = steps;
    stats.train_loss = loss_sum / static_cast<double>(train_set.size());
    stats.val_loss = val_set.empty() ? std::nan("") : evaluate_loss(model, val_set);
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    history.epochs.push_back(stats);
    if (options.on_epoch) options.on_epoch(stats);
  }
  return history;
}

double evaluate_loss(const UNet& model, const std::vector<data::TrainingExample>& examples, std::size_t batch_size) {
  if (examples.empty()) throw UsageError("evaluate_loss: no examples");
  std::vector<std::size_t> idx(examples.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  double sum = 0.0;
  for (std::size_t start = 0; start < idx.size(); start += batch_size) {
    const std::size_t len = std::min(batch_size, idx.size() - start);
    Batch b = make_batch(examples, std::span(idx).subspan(start, len));
    const num::Tensor pred = model.predict(b.spatial, b.met);
    sum += num::mse_loss(pred, b.target) * static_cast<double>(len);
  }
  return sum / static_cast<double>(examples.size());
}

data::RasterGrid predict_denormalized(const UNet& model, const num::Tensor& spatial, const num::Tensor& met,
                                      const data::NormalizationManifest& manifest) {
  const auto& range = manifest.at(data::var::target);
  const num::Tensor y = model.predict(spatial, met);
  if (y.rank() != 3) throw DimensionError("predict_denormalized: expects a single patch");
  data::RasterGrid g = data::RasterGrid::filled(y.dim(1), y.dim(0), data::Units::celsius);
  for (std::size_t i = 0; i < y.size(); ++i) g.values[i] = static_cast<float>(data::denormalize(y[i], range));
  return g;
}

}  // namespace uhinet::unet
