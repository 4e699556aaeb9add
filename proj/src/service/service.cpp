#include "uhinet/service/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "uhinet/errors.hpp"
#include "uhinet/datapipe/stack.hpp"

namespace uhinet::service {

using nlohmann::json;

namespace {

constexpr std::string_view kPrefix = "/api/v1";

Response error(int status, const std::string& message, const std::string& field = "") {
  json body = {{"error", message}};
  if (!field.empty()) body["field"] = field;
  return {status, std::move(body)};
}

json rows_json(const std::vector<unet::MetWindow::value_type>& rows) {
  json out = json::array();
  for (const auto& r : rows) out.push_back(r);
  return out;
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    std::size_t j = i;
    while (j < path.size() && path[j] != '/') ++j;
    if (j > i) parts.emplace_back(path.substr(i, j - i));
    i = j;
  }
  return parts;
}

std::optional<std::int64_t> parse_id(const std::string& text) {
  std::int64_t id = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
  if (ec != std::errc{} || ptr != text.data() + text.size() || id <= 0) return std::nullopt;
  return id;
}

std::int64_t scenario_id_field(const json& req) {
  const auto& v = req.at("scenario_id");
  if (!v.is_number_integer()) throw ApiError(400, "scenario_id", "scenario_id: expected an integer");
  return v.get<std::int64_t>();
}

std::string string_field(const json& req, const char* key, bool required) {
  if (!req.contains(key)) {
    if (required) throw ApiError(400, key, std::string(key) + ": missing");
    return {};
  }
  if (!req.at(key).is_string()) throw ApiError(400, key, std::string(key) + ": expected a string");
  return req.at(key).get<std::string>();
}

json stats_json(const data::RasterGrid& g) {
  double lo = g.values.front();
  double hi = g.values.front();
  double sum = 0.0;
  for (float v : g.values) {
    lo = std::min<double>(lo, v);
    hi = std::max<double>(hi, v);
    sum += v;
  }
  return {{"min", lo}, {"max", hi}, {"mean", sum / static_cast<double>(g.values.size())}};
}

}  // namespace

json Baseline::to_json() const {
  return {{"name", name},     {"patch_id", patch_id},         {"date", data::format_date(date)},
          {"hour", hour},     {"layers", layers_json(layers)}, {"met", met_json(met)},
          {"met_day", rows_json(met_day)}};
}

Baseline Baseline::from_json(const json& j) {
  Baseline b;
  try {
    b.name = j.at("name").get<std::string>();
    b.patch_id = j.at("patch_id").get<int>();
    b.date = data::parse_date(j.at("date").get<std::string>());
    b.hour = j.at("hour").get<int>();
    b.layers = parse_layers(j.at("layers"));
    b.met = parse_met_window(j.at("met"));
    b.met_day = parse_met_rows(j.at("met_day"), kMetDayRows, "met_day");
  } catch (const json::exception& e) {
    throw FormatError(std::string("baseline: ") + e.what());
  } catch (const ApiError& e) {
    throw FormatError(std::string("baseline: ") + e.what());
  }
  return b;
}

Baseline make_baseline(const data::SpatialLayers& layers, const data::PatchIndex& patch, const data::MetSeries& met,
                       data::Date date, int hour) {
  Baseline b;
  b.name = "baseline patch " + std::to_string(patch.id);
  b.patch_id = patch.id;
  b.date = date;
  b.hour = hour;
  b.layers.imperviousness = layers.imperviousness.crop(patch.col0, patch.row0, patch.size, patch.size);
  b.layers.elevation = layers.elevation.crop(patch.col0, patch.row0, patch.size, patch.size);
  b.layers.landcover = layers.landcover.crop(patch.col0, patch.row0, patch.size, patch.size);
  const data::HourStamp first = data::hour_stamp(date, 0) - 2;
  for (std::size_t r = 0; r < kMetDayRows; ++r) {
    b.met_day.push_back(met.at(first + static_cast<data::HourStamp>(r)).values());
  }
  b.met = met_day_window(b.met_day, hour);
  return b;
}

std::filesystem::path baseline_path(const std::filesystem::path& checkpoint) {
  return checkpoint.parent_path() / "baseline.json";
}

unet::MetWindow met_day_window(const std::vector<unet::MetWindow::value_type>& met_day, int hour) {
  if (met_day.size() != kMetDayRows) throw DimensionError("met day must hold 26 hourly rows");
  if (hour < 0 || hour > 23) throw ParameterError("hour must lie in [0, 23]");
  unet::MetWindow w{};
  for (std::size_t s = 0; s < data::kMetSteps; ++s) w[s] = met_day[static_cast<std::size_t>(hour) + s];
  return w;
}

std::vector<data::RasterGrid> predict_patch_day(const unet::UNet& model, const data::NormalizationManifest& manifest,
                                                const data::SpatialLayers& layers,
                                                const std::vector<unet::MetWindow::value_type>& met_day) {
  std::vector<data::RasterGrid> out;
  for (int h = 0; h < 24; ++h) out.push_back(unet::predict_patch(model, manifest, layers, met_day_window(met_day, h)));
  return out;
}

Service::Service(std::shared_ptr<const LoadedModel> model, std::shared_ptr<ScenarioStore> store,
                 std::optional<Baseline> baseline)
    : model_(std::move(model)), store_(std::move(store)), baseline_(std::move(baseline)) {}

Service Service::open(const std::optional<std::filesystem::path>& checkpoint, const std::filesystem::path& store_dir) {
  auto store = std::make_shared<ScenarioStore>(store_dir);
  std::shared_ptr<const LoadedModel> model;
  std::optional<Baseline> baseline;
  if (checkpoint) {
    const std::string bytes = data::read_file(*checkpoint);
    auto ckpt = unet::decode_checkpoint(bytes);
    model = std::make_shared<const LoadedModel>(
        LoadedModel{std::move(ckpt.model), std::move(ckpt.manifest), unet::checkpoint_id(bytes)});
    const auto bpath = baseline_path(*checkpoint);
    if (std::filesystem::exists(bpath)) {
      baseline = Baseline::from_json(json::parse(data::read_file(bpath)));
      const auto id = store->baseline_id();
      if (!id || !store->get(*id)) {
        const Scenario s = store->create(baseline->name, baseline->layers, baseline->met);
        store->set_baseline_id(s.id);
      }
    }
  }
  return Service(std::move(model), std::move(store), std::move(baseline));
}

const LoadedModel& Service::require_model() const {
  if (!model_) throw ApiError(503, "", "no model loaded; start the service with --ckpt");
  return *model_;
}

Scenario Service::scenario_or_404(const std::string& id_text) const {
  const auto id = parse_id(id_text);
  if (!id) throw ApiError(404, "id", "scenario " + id_text + " not found");
  auto s = store_->get(*id);
  if (!s) throw ApiError(404, "id", "scenario " + id_text + " not found");
  return *s;
}

Response Service::handle(const std::string& method, const std::string& path, const std::string& body) const {
  try {
    return route(method, path, body);
  } catch (const ApiError& e) {
    return error(e.status, e.what(), e.field);
  } catch (const json::exception& e) {
    return error(400, std::string("malformed request: ") + e.what());
  } catch (const DimensionError& e) {
    return error(400, e.what());
  } catch (const DataError& e) {
    return error(422, e.what());
  } catch (const ParameterError& e) {
    return error(422, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

Response Service::route(const std::string& method, const std::string& path, const std::string& body) const {
  if (path.rfind(kPrefix, 0) != 0) return error(404, "unknown route " + path);
  const auto parts = split_path(std::string_view(path).substr(kPrefix.size()));
  auto parse_body = [&]() {
    json j = json::parse(body.empty() ? std::string("{}") : body, nullptr, false);
    if (j.is_discarded()) throw ApiError(400, "", "request body is not valid JSON");
    if (!j.is_object()) throw ApiError(400, "", "request body must be a JSON object");
    return j;
  };
  auto method_not_allowed = [&]() { return error(405, method + " not allowed on " + path); };

  if (parts.size() == 1 && parts[0] == "health") {
    if (method != "GET") return method_not_allowed();
    return {200, {{"status", "ok"}}};
  }
  if (parts.size() == 1 && parts[0] == "scenarios") {
    if (method == "GET") {
      json list = json::array();
      for (const auto& [id, s] : *store_->snapshot()) list.push_back(scenario_summary(s));
      return {200, {{"scenarios", list}}};
    }
    if (method == "POST") {
      const json req = parse_body();
      std::string name = string_field(req, "name", true);
      if (!req.contains("layers")) throw ApiError(400, "layers", "layers: missing");
      if (!req.contains("met")) throw ApiError(400, "met", "met: missing");
      auto layers = parse_layers(req.at("layers"));
      const auto met = parse_met_window(req.at("met"));
      return {201, scenario_json(store_->create(std::move(name), std::move(layers), met))};
    }
    return method_not_allowed();
  }
  if (parts.size() == 2 && parts[0] == "scenarios") {
    if (method == "GET") return {200, scenario_json(scenario_or_404(parts[1]))};
    if (method == "PUT") {
      const Scenario current = scenario_or_404(parts[1]);
      const json req = parse_body();
      const std::string modified = string_field(req, "modified", true);
      std::optional<std::string> name;
      if (req.contains("name")) name = string_field(req, "name", true);
      auto layers = req.contains("layers") ? parse_layers(req.at("layers")) : current.layers;
      const auto met = req.contains("met") ? parse_met_window(req.at("met")) : current.met;
      return {200, scenario_json(store_->update(current.id, modified, std::move(name), std::move(layers), met))};
    }
    if (method == "DELETE") {
      const Scenario current = scenario_or_404(parts[1]);
      store_->remove(current.id);
      return {200, {{"deleted", current.id}}};
    }
    return method_not_allowed();
  }
  if (parts.size() == 1 && parts[0] == "baseline") {
    if (method != "GET") return method_not_allowed();
    const auto id = store_->baseline_id();
    if (!id) return error(404, "no baseline scenario; train writes baseline.json next to the checkpoint");
    auto s = store_->get(*id);
    if (!s) return error(404, "baseline scenario was deleted");
    return {200, scenario_json(*s)};
  }
  if (parts.size() == 1 && parts[0] == "predict") {
    if (method != "POST") return method_not_allowed();
    return predict(parse_body());
  }
  if (parts.size() == 1 && parts[0] == "hotspot") {
    if (method != "POST") return method_not_allowed();
    return hotspot(parse_body());
  }
  return error(404, "unknown route " + path);
}

Response Service::predict(const json& req) const {
  const LoadedModel& m = require_model();
  data::SpatialLayers layers;
  unet::MetWindow met{};
  json source;
  if (req.contains("scenario_id")) {
    const auto id = scenario_id_field(req);
    auto s = store_->get(id);
    if (!s) throw ApiError(404, "scenario_id", "scenario " + std::to_string(id) + " not found");
    layers = s->layers;
    met = s->met;
    source = {{"scenario_id", id}};
  } else {
    if (!req.contains("layers") || !req.contains("met")) {
      throw ApiError(400, "", "request needs scenario_id or inline layers and met");
    }
    layers = parse_layers(req.at("layers"), m.model.config().input_size);
    met = parse_met_window(req.at("met"));
    source = "inline";
  }
  const data::RasterGrid t_a = unet::predict_patch(m.model, m.manifest, layers, met);
  json out = stats_json(t_a);
  out["t_a"] = grid_json(t_a);
  out["checkpoint_id"] = m.checkpoint_id;
  out["source"] = source;
  bool elevation_edited = false;
  if (baseline_) elevation_edited = !(layers.elevation.values == baseline_->layers.elevation.values);
  out["elevation_edited"] = elevation_edited;
  if (req.contains("baseline_id")) {
    const auto& v = req.at("baseline_id");
    if (!v.is_number_integer()) throw ApiError(400, "baseline_id", "baseline_id: expected an integer");
    auto b = store_->get(v.get<std::int64_t>());
    if (!b) throw ApiError(404, "baseline_id", "scenario " + std::to_string(v.get<std::int64_t>()) + " not found");
    const data::RasterGrid base = unet::predict_patch(m.model, m.manifest, b->layers, b->met);
    data::RasterGrid delta = t_a;
    for (std::size_t i = 0; i < delta.values.size(); ++i) delta.values[i] = t_a.values[i] - base.values[i];
    out["delta"] = grid_json(delta);
    out["baseline_id"] = b->id;
  }
  return {200, std::move(out)};
}

Response Service::hotspot(const json& req) const {
  double epsilon = hotspot::kDefaultEpsilon;
  if (req.contains("epsilon")) {
    if (!req.at("epsilon").is_number()) throw ApiError(400, "epsilon", "epsilon: expected a number");
    epsilon = req.at("epsilon").get<double>();
    if (!(epsilon >= 0.0)) throw ApiError(422, "epsilon", "epsilon must be >= 0");
  }
  std::vector<int> hours;
  if (req.contains("hours")) {
    const auto& h = req.at("hours");
    if (!h.is_array()) throw ApiError(400, "hours", "hours: expected an array of integers");
    for (const auto& v : h) {
      if (!v.is_number_integer()) throw ApiError(400, "hours", "hours: expected an array of integers");
      const int hour = v.get<int>();
      if (hour < 0 || hour > 23) throw ApiError(422, "hours", "hours must lie in [0, 23]");
      hours.push_back(hour);
    }
  } else {
    for (int h = 0; h < 24; ++h) hours.push_back(h);
  }

  std::vector<std::vector<data::RasterGrid>> stack;
  if (req.contains("stack")) {
    const auto& ref = req.at("stack");
    if (!ref.is_object() || !ref.contains("dir")) throw ApiError(400, "stack", "stack: expected {dir, dates?}");
    const std::filesystem::path dir = ref.at("dir").get<std::string>();
    if (!std::filesystem::is_directory(dir)) throw ApiError(404, "stack.dir", "stack directory not found");
    std::vector<data::Date> dates;
    if (ref.contains("dates")) {
      for (const auto& d : ref.at("dates")) dates.push_back(data::parse_date(d.get<std::string>()));
    } else {
      dates = data::stack_dates(dir);
    }
    stack = data::read_stack(dir, dates).grids;
  } else {
    const LoadedModel& m = require_model();
    data::SpatialLayers layers;
    if (req.contains("scenario_id")) {
      const auto id = scenario_id_field(req);
      auto s = store_->get(id);
      if (!s) throw ApiError(404, "scenario_id", "scenario " + std::to_string(id) + " not found");
      layers = s->layers;
    } else if (req.contains("layers")) {
      layers = parse_layers(req.at("layers"), m.model.config().input_size);
    } else {
      throw ApiError(400, "", "request needs scenario_id, inline layers, or a stack reference");
    }
    std::vector<unet::MetWindow::value_type> met_day;
    if (req.contains("met_day")) {
      met_day = parse_met_rows(req.at("met_day"), kMetDayRows, "met_day");
    } else if (baseline_) {
      met_day = baseline_->met_day;
    } else {
      throw ApiError(400, "met_day", "met_day: required when the checkpoint has no baseline day");
    }
    stack.push_back(predict_patch_day(m.model, m.manifest, layers, met_day));
  }

  const auto maps = hotspot::trel_daily_cycle(stack, epsilon);
  json out_maps = json::array();
  for (int h : hours) {
    out_maps.push_back({{"hour", h}, {"t_rel", grid_json(maps.at(static_cast<std::size_t>(h)).to_grid())}});
  }
  json out = {{"epsilon", epsilon}, {"day_count", stack.size()}, {"maps", std::move(out_maps)}};
  if (model_) out["checkpoint_id"] = model_->checkpoint_id;
  return {200, std::move(out)};
}

}  // namespace uhinet::service
