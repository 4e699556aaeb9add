#include "uhinet/service/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "uhinet/errors.hpp"

namespace uhinet::service {

using nlohmann::json;

namespace {

data::RasterGrid parse_grid(const json& j, std::size_t size, const std::string& field, data::Units units) {
  if (!j.is_array()) throw ApiError(400, field, field + ": expected an array of rows");
  if (j.size() != size) {
    throw ApiError(400, field, field + ": expected " + std::to_string(size) + " rows, got " + std::to_string(j.size()));
  }
  data::RasterGrid g = data::RasterGrid::filled(size, size, units);
  for (std::size_t y = 0; y < size; ++y) {
    const auto& row = j[y];
    const std::string rf = field + "[" + std::to_string(y) + "]";
    if (!row.is_array()) throw ApiError(400, rf, rf + ": expected an array");
    if (row.size() != size) {
      throw ApiError(400, rf, rf + ": expected " + std::to_string(size) + " values, got " + std::to_string(row.size()));
    }
    for (std::size_t x = 0; x < size; ++x) {
      if (!row[x].is_number()) throw ApiError(400, rf, rf + ": non-numeric value");
      const double v = row[x].get<double>();
      if (!std::isfinite(v)) throw ApiError(422, rf, rf + ": non-finite value");
      g.at(x, y) = static_cast<float>(v);
    }
  }
  return g;
}

std::string iso_now_micros(std::chrono::system_clock::time_point tp) {
  const auto us = std::chrono::duration_cast<std::chrono::microseconds>(tp.time_since_epoch()).count();
  const auto day = std::chrono::floor<std::chrono::days>(tp);
  const auto in_day = us - std::chrono::duration_cast<std::chrono::microseconds>(day.time_since_epoch()).count();
  char buf[40];
  std::snprintf(buf, sizeof buf, "T%02lld:%02lld:%02lld.%06lldZ", static_cast<long long>(in_day / 3600000000LL),
                static_cast<long long>(in_day / 60000000LL % 60), static_cast<long long>(in_day / 1000000LL % 60),
                static_cast<long long>(in_day % 1000000LL));
  return data::format_date(data::Date{day}) + buf;
}

}  // namespace

data::SpatialLayers parse_layers(const json& j, std::size_t size) {
  if (!j.is_object()) throw ApiError(400, "layers", "layers: expected an object");
  for (const char* key : {"imperviousness", "elevation", "landcover"}) {
    if (!j.contains(key)) throw ApiError(400, std::string("layers.") + key, std::string("layers.") + key + ": missing");
  }
  data::SpatialLayers l;
  l.imperviousness = parse_grid(j.at("imperviousness"), size, "layers.imperviousness", data::Units::fraction);
  l.elevation = parse_grid(j.at("elevation"), size, "layers.elevation", data::Units::meters);
  l.landcover = parse_grid(j.at("landcover"), size, "layers.landcover", data::Units::category);
  for (float v : l.imperviousness.values) {
    if (v < 0.0F || v > 1.0F) throw ApiError(422, "layers.imperviousness", "layers.imperviousness: values must lie in [0, 1]");
  }
  for (float v : l.landcover.values) {
    if (!data::valid_landcover_code(v)) {
      throw ApiError(422, "layers.landcover", "layers.landcover: codes must be 0 (water), 1 (vegetation), 2 (urban) or 3 (industrial)");
    }
  }
  return l;
}

std::vector<unet::MetWindow::value_type> parse_met_rows(const json& j, std::size_t rows, const std::string& field) {
  if (!j.is_array() || j.size() != rows) {
    throw ApiError(400, field, field + ": expected " + std::to_string(rows) + " rows of [t2m, precip, q, u10, v10]");
  }
  std::vector<unet::MetWindow::value_type> out(rows);
  for (std::size_t s = 0; s < rows; ++s) {
    const std::string rf = field + "[" + std::to_string(s) + "]";
    if (!j[s].is_array() || j[s].size() != data::kMetVars) throw ApiError(400, rf, rf + ": expected 5 values");
    for (std::size_t k = 0; k < data::kMetVars; ++k) {
      if (!j[s][k].is_number()) throw ApiError(400, rf, rf + ": non-numeric value");
      out[s][k] = j[s][k].get<double>();
      if (!std::isfinite(out[s][k])) throw ApiError(422, rf, rf + ": non-finite value");
    }
    if (out[s][1] < 0.0) throw ApiError(422, rf, rf + ": precipitation must be >= 0");
    if (out[s][2] < 0.0) throw ApiError(422, rf, rf + ": specific humidity must be >= 0");
  }
  return out;
}

unet::MetWindow parse_met_window(const json& j, const std::string& field) {
  const auto rows = parse_met_rows(j, data::kMetSteps, field);
  unet::MetWindow w{};
  for (std::size_t s = 0; s < data::kMetSteps; ++s) w[s] = rows[s];
  return w;
}

json grid_json(const data::RasterGrid& g) {
  json rows = json::array();
  for (std::size_t y = 0; y < g.height; ++y) {
    json row = json::array();
    for (std::size_t x = 0; x < g.width; ++x) row.push_back(g.is_nodata(x, y) ? json(nullptr) : json(g.at(x, y)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json layers_json(const data::SpatialLayers& l) {
  return {{"imperviousness", grid_json(l.imperviousness)},
          {"elevation", grid_json(l.elevation)},
          {"landcover", grid_json(l.landcover)}};
}

json met_json(const unet::MetWindow& met) {
  json rows = json::array();
  for (const auto& r : met) rows.push_back(r);
  return rows;
}

json scenario_summary(const Scenario& s) {
  return {{"id", s.id}, {"name", s.name}, {"created", s.created}, {"modified", s.modified}};
}

json scenario_json(const Scenario& s) {
  json j = scenario_summary(s);
  j["layers"] = layers_json(s.layers);
  j["met"] = met_json(s.met);
  return j;
}

Scenario scenario_from_json(const json& j) {
  Scenario s;
  try {
    s.id = j.at("id").get<std::int64_t>();
    s.name = j.at("name").get<std::string>();
    s.created = j.at("created").get<std::string>();
    s.modified = j.at("modified").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("scenario document: ") + e.what());
  }
  s.layers = parse_layers(j.at("layers"));
  s.met = parse_met_window(j.at("met"));
  return s;
}

ScenarioStore::ScenarioStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  auto scenarios = std::make_shared<std::map<std::int64_t, Scenario>>();
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("scenario-", 0) != 0 || entry.path().extension() != ".json") continue;
    try {
      Scenario s = scenario_from_json(json::parse(data::read_file(entry.path())));
      const auto id = s.id;
      (*scenarios)[id] = std::move(s);
    } catch (const std::exception& e) {
      throw FormatError(entry.path().string() + ": " + e.what());
    }
  }
  const auto meta_path = dir_ / "store.json";
  if (std::filesystem::exists(meta_path)) {
    const json meta = json::parse(data::read_file(meta_path));
    next_id_ = meta.value("next_id", std::int64_t{1});
    if (meta.contains("baseline_id") && !meta.at("baseline_id").is_null()) {
      baseline_id_ = meta.at("baseline_id").get<std::int64_t>();
    }
  }
  if (!scenarios->empty()) next_id_ = std::max(next_id_, scenarios->rbegin()->first + 1);
  current_ = std::move(scenarios);
}

ScenarioStore::Snapshot ScenarioStore::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

std::optional<Scenario> ScenarioStore::get(std::int64_t id) const {
  const auto snap = snapshot();
  auto it = snap->find(id);
  if (it == snap->end()) return std::nullopt;
  return it->second;
}

std::string ScenarioStore::next_timestamp(const std::string& previous) const {
  auto now = std::chrono::system_clock::now();
  std::string ts = iso_now_micros(now);
  while (!previous.empty() && ts <= previous) {
    now += std::chrono::microseconds(1);
    ts = iso_now_micros(now);
  }
  return ts;
}

void ScenarioStore::persist_meta() {
  const json meta = {{"next_id", next_id_}, {"baseline_id", baseline_id_ ? json(*baseline_id_) : json(nullptr)}};
  data::write_file(dir_ / "store.json", meta.dump(2) + "\n");
}

Scenario ScenarioStore::create(std::string name, data::SpatialLayers layers, const unet::MetWindow& met) {
  std::lock_guard lock(write_mutex_);
  Scenario s;
  s.id = next_id_++;
  s.name = std::move(name);
  s.layers = std::move(layers);
  s.met = met;
  s.created = next_timestamp("");
  s.modified = s.created;
  data::write_file(dir_ / ("scenario-" + std::to_string(s.id) + ".json"), scenario_json(s).dump() + "\n");
  persist_meta();
  auto next = std::make_shared<std::map<std::int64_t, Scenario>>(*snapshot());
  (*next)[s.id] = s;
  std::lock_guard snap_lock(snapshot_mutex_);
  current_ = std::move(next);
  return s;
}

Scenario ScenarioStore::update(std::int64_t id, const std::string& expected_modified, std::optional<std::string> name,
                               data::SpatialLayers layers, const unet::MetWindow& met) {
  std::lock_guard lock(write_mutex_);
  auto existing = get(id);
  if (!existing) throw ApiError(404, "id", "scenario " + std::to_string(id) + " not found");
  if (existing->modified != expected_modified) {
    throw ApiError(409, "modified",
                   "scenario " + std::to_string(id) + " was modified at " + existing->modified + "; reload and retry");
  }
  Scenario s = *existing;
  if (name) s.name = std::move(*name);
  s.layers = std::move(layers);
  s.met = met;
  s.modified = next_timestamp(existing->modified);
  data::write_file(dir_ / ("scenario-" + std::to_string(s.id) + ".json"), scenario_json(s).dump() + "\n");
  auto next = std::make_shared<std::map<std::int64_t, Scenario>>(*snapshot());
  (*next)[s.id] = s;
  std::lock_guard snap_lock(snapshot_mutex_);
  current_ = std::move(next);
  return s;
}

void ScenarioStore::remove(std::int64_t id) {
  std::lock_guard lock(write_mutex_);
  if (!get(id)) throw ApiError(404, "id", "scenario " + std::to_string(id) + " not found");
  std::filesystem::remove(dir_ / ("scenario-" + std::to_string(id) + ".json"));
  auto next = std::make_shared<std::map<std::int64_t, Scenario>>(*snapshot());
  next->erase(id);
  if (baseline_id_ == id) {
    baseline_id_.reset();
    persist_meta();
  }
  std::lock_guard snap_lock(snapshot_mutex_);
  current_ = std::move(next);
}

std::optional<std::int64_t> ScenarioStore::baseline_id() const {
  std::lock_guard lock(write_mutex_);
  return baseline_id_;
}

void ScenarioStore::set_baseline_id(std::int64_t id) {
  std::lock_guard lock(write_mutex_);
  baseline_id_ = id;
  persist_meta();
}

}  // namespace uhinet::service
