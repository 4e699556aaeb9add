#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "uhinet/datapipe/examples.hpp"
#include "uhinet/unet/inference.hpp"

namespace uhinet::service {

inline constexpr std::size_t kScenarioSize = 32;

struct Scenario {
  std::int64_t id = 0;
  std::string name;
  data::SpatialLayers layers;  // kScenarioSize x kScenarioSize
  unet::MetWindow met{};
  std::string created;
  std::string modified;  // ISO-8601 UTC with microseconds; strictly increases per update
};

// Request-shaped problem with an HTTP status attached.
struct ApiError : std::runtime_error {
  int status;
  std::string field;
  ApiError(int status_, std::string field_, const std::string& message)
      : std::runtime_error(message), status(status_), field(std::move(field_)) {}
};

// Grids are row-major nested arrays. Shape problems raise 400, values outside
// the declared ranges (imperviousness [0,1], land-cover palette, precip and
// humidity >= 0, finite numbers) raise 422.
data::SpatialLayers parse_layers(const nlohmann::json& j, std::size_t size = kScenarioSize);
unet::MetWindow parse_met_window(const nlohmann::json& j, const std::string& field = "met");
std::vector<unet::MetWindow::value_type> parse_met_rows(const nlohmann::json& j, std::size_t rows,
                                                        const std::string& field);

nlohmann::json grid_json(const data::RasterGrid& g);  // nodata cells as null
nlohmann::json layers_json(const data::SpatialLayers& layers);
nlohmann::json met_json(const unet::MetWindow& met);

nlohmann::json scenario_json(const Scenario& s);
nlohmann::json scenario_summary(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);  // full stored form

// One JSON document per scenario under a directory, plus store.json holding
// the id counter and the baseline id. Writes go through a single mutex;
// readers take an immutable snapshot.
class ScenarioStore {
 public:
  explicit ScenarioStore(std::filesystem::path dir);

  using Snapshot = std::shared_ptr<const std::map<std::int64_t, Scenario>>;
  Snapshot snapshot() const;

  std::optional<Scenario> get(std::int64_t id) const;
  Scenario create(std::string name, data::SpatialLayers layers, const unet::MetWindow& met);
  // Throws ApiError 404 for an unknown id and 409 when `expected_modified`
  // differs from the stored timestamp.
  Scenario update(std::int64_t id, const std::string& expected_modified, std::optional<std::string> name,
                  data::SpatialLayers layers, const unet::MetWindow& met);
  void remove(std::int64_t id);

  std::optional<std::int64_t> baseline_id() const;
  void set_baseline_id(std::int64_t id);

 private:
  void persist_meta();
  std::string next_timestamp(const std::string& previous) const;

  std::filesystem::path dir_;
  mutable std::mutex write_mutex_;
  mutable std::mutex snapshot_mutex_;
  Snapshot current_;
  std::int64_t next_id_ = 1;
  std::optional<std::int64_t> baseline_id_;
};

}  // namespace uhinet::service
