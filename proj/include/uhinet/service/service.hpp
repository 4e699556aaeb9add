#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "uhinet/hotspot/hotspot.hpp"
#include "uhinet/service/scenario.hpp"
#include "uhinet/unet/checkpoint.hpp"

namespace uhinet::service {

inline constexpr std::size_t kMetDayRows = 26;  // hours -2..23 of one day

// Reference what-if starting point written next to a checkpoint: one training
// patch with the met window at `hour` and the full met day around it.
struct Baseline {
  std::string name;
  int patch_id = 0;
  data::Date date{};
  int hour = 0;
  data::SpatialLayers layers;
  unet::MetWindow met{};
  std::vector<unet::MetWindow::value_type> met_day;  // kMetDayRows rows

  nlohmann::json to_json() const;
  static Baseline from_json(const nlohmann::json& j);
};

Baseline make_baseline(const data::SpatialLayers& layers, const data::PatchIndex& patch, const data::MetSeries& met,
                       data::Date date, int hour);
std::filesystem::path baseline_path(const std::filesystem::path& checkpoint);

unet::MetWindow met_day_window(const std::vector<unet::MetWindow::value_type>& met_day, int hour);

// Predicted diurnal cycle of one patch: one grid per hour, windows taken from a met day.
std::vector<data::RasterGrid> predict_patch_day(const unet::UNet& model, const data::NormalizationManifest& manifest,
                                                const data::SpatialLayers& layers,
                                                const std::vector<unet::MetWindow::value_type>& met_day);

struct Response {
  int status = 200;
  nlohmann::json body;
};

struct LoadedModel {
  unet::UNet model;
  data::NormalizationManifest manifest;
  std::string checkpoint_id;
};

// Routing core, independent of the HTTP transport. Thread-safe: the model is
// immutable and the store serializes its own writes.
class Service {
 public:
  Service(std::shared_ptr<const LoadedModel> model, std::shared_ptr<ScenarioStore> store,
          std::optional<Baseline> baseline = std::nullopt);

  // Reads the checkpoint and, when present, the baseline beside it; the
  // baseline is stored as a scenario on first start.
  static Service open(const std::optional<std::filesystem::path>& checkpoint, const std::filesystem::path& store_dir);

  Response handle(const std::string& method, const std::string& path, const std::string& body) const;

  const ScenarioStore& store() const { return *store_; }

 private:
  Response route(const std::string& method, const std::string& path, const std::string& body) const;
  Response predict(const nlohmann::json& req) const;
  Response hotspot(const nlohmann::json& req) const;
  const LoadedModel& require_model() const;
  Scenario scenario_or_404(const std::string& id_text) const;

  std::shared_ptr<const LoadedModel> model_;
  std::shared_ptr<ScenarioStore> store_;
  std::optional<Baseline> baseline_;
};

// Blocks serving `service` on host:port until the process stops.
void serve(const Service& service, const std::string& host, int port);

}  // namespace uhinet::service
