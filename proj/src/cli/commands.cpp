#include "uhinet/cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "uhinet/cli/plot.hpp"
#include "uhinet/config_json.hpp"
#include "uhinet/datapipe/stack.hpp"
#include "uhinet/datapipe/synth.hpp"
#include "uhinet/errors.hpp"
#include "uhinet/eval/eval.hpp"
#include "uhinet/hotspot/hotspot.hpp"
#include "uhinet/lwt/lwt.hpp"
#include "uhinet/service/service.hpp"
#include "uhinet/unet/checkpoint.hpp"
#include "uhinet/unet/inference.hpp"

namespace uhinet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("UHINET_LOG");
  if (!env) return LogLevel::info;
  const std::string v = env;
  if (v == "error") return LogLevel::error;
  if (v == "debug") return LogLevel::debug;
  if (v == "info") return LogLevel::info;
  throw ConfigError("UHINET_LOG must be error, info or debug, got '" + v + "'");
}

void log(LogLevel level, const std::string& message) {
  if (level > log_level()) return;
  static constexpr const char* names[] = {"error", "info", "debug"};
  std::cerr << "[uhinet " << names[static_cast<int>(level)] << "] " << message << "\n";
}

json read_json(const fs::path& path) {
  std::string text;
  try {
    text = data::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError(path.string() + ": not valid JSON");
  return j;
}

void write_json(const fs::path& path, const json& j) { data::write_file(path, j.dump(2) + "\n"); }

// Data directory written by `synth`.
struct DataDir {
  fs::path root;
  data::SpatialLayers layers;
  data::MetSeries met;

  fs::path oracle() const { return root / "oracle"; }
};

DataDir load_data(const fs::path& root) {
  DataDir d;
  d.root = root;
  d.layers.imperviousness = data::read_grd1(root / "spatial" / "imperviousness.grd");
  d.layers.elevation = data::read_grd1(root / "spatial" / "elevation.grd");
  d.layers.landcover = data::read_grd1(root / "spatial" / "landcover.grd");
  d.layers.validate();
  d.met = data::read_met_csv(root / "met.csv");
  return d;
}

data::TargetProvider stack_provider(const fs::path& dir) {
  return [dir](data::Date d, int h) {
    const fs::path file = data::stack_file(dir, d, h);
    if (!fs::exists(file)) throw DataError("no target grid " + file.string());
    return data::read_grd1(file);
  };
}

fs::path checkpoint_file(const fs::path& p) { return fs::is_directory(p) ? p / "model.ckpt" : p; }

// ---- synth ----

struct SynthRun {
  data::SynthWorldConfig world;
  std::string oracle_start = "2016-07-01";
  int oracle_days = 62;
  double station_noise = 0.4;  // degC, hourly sensor noise of the synthetic measurements
  double station_bias = 0.3;   // degC, sd of the per-station offset

  json to_json() const {
    json j = world.to_json();
    j["oracle_start"] = oracle_start;
    j["oracle_days"] = oracle_days;
    j["station_noise"] = station_noise;
    j["station_bias"] = station_bias;
    return j;
  }
};

SynthRun read_synth_config(const std::optional<fs::path>& path) {
  SynthRun run;
  if (!path) return run;
  json j = read_json(*path);
  if (!j.is_object()) throw ConfigError("synth config: expected a JSON object");
  json world = j;
  ConfigReader r(j, "synth config");
  r.get("oracle_start", run.oracle_start);
  r.get("oracle_days", run.oracle_days);
  r.get("station_noise", run.station_noise);
  r.get("station_bias", run.station_bias);
  for (const char* key : {"oracle_start", "oracle_days", "station_noise", "station_bias"}) world.erase(key);
  run.world = data::SynthWorldConfig::from_json(world);
  if (run.oracle_days < 0) throw ConfigError("synth config: oracle_days must be >= 0");
  if (!(run.station_noise >= 0.0) || !(run.station_bias >= 0.0)) {
    throw ConfigError("synth config: station noise and bias must be >= 0");
  }
  return run;
}

int cmd_synth(const std::optional<fs::path>& config, const fs::path& out, const std::optional<fs::path>& stations,
              std::optional<std::uint64_t> seed) {
  SynthRun run = read_synth_config(config);
  if (seed) run.world.seed = *seed;
  log(LogLevel::info, "synth config " + run.to_json().dump());
  const data::SynthWorld world(run.world);

  data::write_grd1(out / "spatial" / "imperviousness.grd", world.layers().imperviousness);
  data::write_grd1(out / "spatial" / "elevation.grd", world.layers().elevation);
  data::write_grd1(out / "spatial" / "landcover.grd", world.layers().landcover);
  data::write_met_csv(out / "met.csv", world.met());

  json days = json::array();
  for (const auto& d : world.days()) {
    days.push_back({{"date", data::format_date(d.date)}, {"weather_type", d.weather_type}});
  }
  const data::Date first = data::parse_date(run.oracle_start);
  std::vector<data::Date> oracle_dates;
  for (int i = 0; i < run.oracle_days; ++i) oracle_dates.push_back(first + std::chrono::days(i));
  write_json(out / "world.json", {{"config", run.to_json()},
                                  {"weather_types", days},
                                  {"target_weather_type", data::kTargetWeatherType},
                                  {"oracle_dates", {{"from", run.oracle_start}, {"days", run.oracle_days}}}});

  // Synthetic "measurements" for listed stations: the oracle at the station
  // pixel, a fixed per-station offset and independent hourly sensor noise.
  struct Station {
    std::string name;
    std::size_t x = 0;
    std::size_t y = 0;
    Rng rng;
    double bias = 0.0;
    std::string csv = "timestamp,t_degC\n";
  };
  std::vector<Station> station_list;
  if (stations) {
    const json spec = read_json(*stations);
    if (!spec.is_array()) throw ConfigError("stations: expected an array");
    for (const auto& s : spec) {
      Station st;
      try {
        st.name = s.at("name").get<std::string>();
        st.x = s.at("x").get<std::size_t>();
        st.y = s.at("y").get<std::size_t>();
      } catch (const json::exception& e) {
        throw ConfigError(std::string("stations: ") + e.what());
      }
      if (st.x >= run.world.domain || st.y >= run.world.domain) {
        throw ConfigError("stations: " + st.name + " lies outside the domain");
      }
      std::uint64_t h = 1469598103934665603ULL;
      for (unsigned char c : st.name) h = (h ^ c) * 1099511628211ULL;
      st.rng = Rng(derive_seed(run.world.seed, 0x57a7, h));
      st.bias = st.rng.normal(0.0, run.station_bias);
      station_list.push_back(std::move(st));
    }
  }

  for (data::Date d : oracle_dates) {
    for (int h = 0; h < 24; ++h) {
      const data::RasterGrid grid = world.oracle(d, h);
      data::write_grd1(data::stack_file(out / "oracle", d, h), grid);
      for (auto& st : station_list) {
        const double v = grid.at(st.x, st.y) + st.bias + st.rng.normal(0.0, run.station_noise);
        char buf[64];
        std::snprintf(buf, sizeof buf, ",%.6f\n", v);
        st.csv += data::format_timestamp(data::hour_stamp(d, h)) + buf;
      }
    }
  }
  log(LogLevel::info, "synth wrote " + std::to_string(oracle_dates.size()) + " oracle days to " + out.string());

  if (stations) {
    json written = json::array();
    for (const auto& st : station_list) {
      const std::string file = "measurements/" + st.name + ".csv";
      data::write_file(out / file, st.csv);
      written.push_back({{"name", st.name}, {"x", st.x}, {"y", st.y}, {"series_file", file}});
    }
    write_json(out / "stations.json", written);
  }
  return kExitOk;
}

// ---- lwt ----

struct LwtConfig {
  int k = 12;
  std::uint64_t seed = 1;
  std::string baseline_from = "2015-01-01";
  std::string baseline_to = "2015-12-31";
  std::string period_from = "2016-07-01";
  std::string period_to = "2016-08-31";
  std::optional<int> cluster_override;

  json to_json() const {
    return {{"k", k},
            {"seed", seed},
            {"baseline", {{"from", baseline_from}, {"to", baseline_to}}},
            {"period", {{"from", period_from}, {"to", period_to}}},
            {"cluster_override", cluster_override ? json(*cluster_override) : json(nullptr)}};
  }
};

LwtConfig read_lwt_config(const std::optional<fs::path>& path) {
  LwtConfig c;
  if (!path) return c;
  const json j = read_json(*path);
  ConfigReader r(j, "lwt config");
  r.get("k", c.k);
  r.get("seed", c.seed);
  auto range = [&](const char* key, std::string& from, std::string& to) {
    if (const json* sub = r.child(key)) {
      ConfigReader rr(*sub, std::string("lwt config ") + key);
      rr.get("from", from);
      rr.get("to", to);
      rr.finish();
    }
  };
  range("baseline", c.baseline_from, c.baseline_to);
  range("period", c.period_from, c.period_to);
  if (const json* o = r.child("cluster_override"); o && !o->is_null()) {
    if (!o->is_number_integer()) throw ConfigError("lwt config: cluster_override must be an integer or null");
    c.cluster_override = o->get<int>();
  }
  r.finish();
  return c;
}

int cmd_lwt(const fs::path& data_dir, const std::optional<fs::path>& config, const fs::path& out,
            std::optional<std::uint64_t> seed) {
  LwtConfig c = read_lwt_config(config);
  if (seed) c.seed = *seed;
  log(LogLevel::info, "lwt config " + c.to_json().dump());
  const data::MetSeries met = data::read_met_csv(data_dir / "met.csv");
  const auto baseline =
      lwt::daily_metrics_range(met, data::parse_date(c.baseline_from), data::parse_date(c.baseline_to));
  const auto period = lwt::daily_metrics_range(met, data::parse_date(c.period_from), data::parse_date(c.period_to));
  if (baseline.empty()) throw DataError("lwt: no complete baseline days in the met record");
  if (period.empty()) throw DataError("lwt: no complete period days in the met record");
  const auto assignment = lwt::cluster_lwt(baseline, c.k, c.seed);
  const auto selection = lwt::select_target_lwt(assignment, baseline, period, c.cluster_override);
  log(LogLevel::info, "lwt selected cluster " + std::to_string(selection.cluster_id) + " with " +
                          std::to_string(selection.days.size()) + " period days");
  const json doc = lwt::lwt_document(assignment, baseline, selection, c.to_json().at("period"));
  write_json(out, doc);
  return kExitOk;
}

// ---- train ----

struct TrainConfig {
  unet::UNetConfig model;
  data::SplitSpec split;
  std::optional<int> baseline_patch;
  int baseline_hour = 14;

  json to_json() const {
    return {{"model", model.to_json()},
            {"split", split.to_json()},
            {"baseline", {{"patch_id", baseline_patch ? json(*baseline_patch) : json(nullptr)},
                          {"hour", baseline_hour}}}};
  }
};

TrainConfig read_train_config(const std::optional<fs::path>& path) {
  TrainConfig c;
  if (!path) return c;
  const json j = read_json(*path);
  ConfigReader r(j, "train config");
  if (const json* m = r.child("model")) c.model = unet::UNetConfig::from_json(*m);
  if (const json* s = r.child("split")) c.split = data::SplitSpec::from_json(*s);
  if (const json* b = r.child("baseline")) {
    ConfigReader rb(*b, "train config baseline");
    if (const json* p = rb.child("patch_id"); p && !p->is_null()) {
      if (!p->is_number_integer()) throw ConfigError("train config baseline: patch_id must be an integer");
      c.baseline_patch = p->get<int>();
    }
    rb.get("hour", c.baseline_hour);
    rb.finish();
    if (c.baseline_hour < 0 || c.baseline_hour > 23) throw ConfigError("train config baseline: hour must be 0..23");
  }
  r.finish();
  return c;
}

json split_json(const data::SplitSpec& spec, const std::vector<data::PatchIndex>& patches) {
  json list = json::array();
  for (const auto& p : patches) {
    list.push_back({{"id", p.id},
                    {"row0", p.row0},
                    {"col0", p.col0},
                    {"size", p.size},
                    {"split", std::string(data::split_name(p.split))}});
  }
  return {{"spec", spec.to_json()}, {"patches", list}};
}

std::vector<data::PatchIndex> read_split_patches(const fs::path& path) {
  const json j = read_json(path);
  std::vector<data::PatchIndex> out;
  try {
    for (const auto& p : j.at("patches")) {
      data::PatchIndex idx;
      idx.id = p.at("id").get<int>();
      idx.row0 = p.at("row0").get<std::size_t>();
      idx.col0 = p.at("col0").get<std::size_t>();
      idx.size = p.at("size").get<std::size_t>();
      const std::string s = p.at("split").get<std::string>();
      idx.split = s == "train" ? data::Split::train
                  : s == "val" ? data::Split::val
                  : s == "test" ? data::Split::test
                                : data::Split::excluded;
      out.push_back(idx);
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return out;
}

int cmd_train(const fs::path& data_dir, const fs::path& days_file, const std::optional<fs::path>& config,
              const fs::path& out, std::optional<std::uint64_t> seed) {
  TrainConfig c = read_train_config(config);
  if (seed) {
    c.model.seed = *seed;
    c.split.seed = *seed;
  }
  c.model.validate();
  log(LogLevel::info, "train config " + c.to_json().dump());

  const DataDir d = load_data(data_dir);
  const auto days = lwt::selected_days(read_json(days_file));
  if (days.empty()) throw DataError("train: the day list in " + days_file.string() + " is empty");
  const auto patches = data::split_patches(data::make_patches(d.layers.width(), d.layers.height(), c.model.input_size),
                                           c.split);
  const auto train_patches = data::patches_in(patches, data::Split::train);
  const auto val_patches = data::patches_in(patches, data::Split::val);
  if (train_patches.empty()) throw ConfigError("train: the split has no training patches");
  const auto provider = stack_provider(d.oracle());

  const auto manifest = data::fit_training_manifest(d.layers, train_patches, d.met, provider, days);
  auto train_set = data::assemble_examples(train_patches, d.layers, d.met, provider, days, manifest);
  std::vector<data::TrainingExample> val_set;
  if (!val_patches.empty()) val_set = data::assemble_examples(val_patches, d.layers, d.met, provider, days, manifest);
  log(LogLevel::info, "train: " + std::to_string(train_set.size()) + " training and " +
                          std::to_string(val_set.size()) + " validation examples over " +
                          std::to_string(days.size()) + " days");

  write_json(out / "manifest.json", manifest.to_json());
  write_json(out / "split.json", split_json(c.split, patches));
  const data::PatchIndex* base = &train_patches.front();
  if (c.baseline_patch) {
    auto it = std::find_if(patches.begin(), patches.end(), [&](const auto& p) { return p.id == *c.baseline_patch; });
    if (it == patches.end()) throw ConfigError("train config baseline: unknown patch " + std::to_string(*c.baseline_patch));
    base = &*it;
  }
  write_json(out / "baseline.json",
             service::make_baseline(d.layers, *base, d.met, days.front(), c.baseline_hour).to_json());

  unet::UNet model = unet::UNet::build(c.model);
  unet::TrainerState state = unet::TrainerState::fresh(model);
  unet::TrainHistory history;
  unet::TrainOptions options;
  options.on_epoch = [&](const unet::EpochStats& s) {
    history.epochs.push_back(s);
    log(LogLevel::info, "epoch " + std::to_string(s.epoch) + " train_loss " + std::to_string(s.train_loss) +
                            " val_loss " + std::to_string(s.val_loss) + " (" + std::to_string(s.seconds) + " s)");
    unet::save_checkpoint(out / "model.ckpt", model, state, manifest);
    write_json(out / "history.json", {{"epochs", history.to_json()}});
  };
  try {
    unet::train(model, state, train_set, val_set, options);
  } catch (const NumericError&) {
    unet::save_checkpoint(out / "model.ckpt", model, state, manifest);
    write_json(out / "history.json", {{"epochs", history.to_json()}});
    throw;
  }
  if (c.model.epochs == 0) unet::save_checkpoint(out / "model.ckpt", model, state, manifest);
  if (history.epochs.empty()) write_json(out / "history.json", {{"epochs", history.to_json()}});
  return kExitOk;
}

// ---- predict ----

int cmd_predict(const fs::path& data_dir, const fs::path& ckpt_arg, const fs::path& days_file,
                const std::string& which, const fs::path& out) {
  const fs::path ckpt_path = checkpoint_file(ckpt_arg);
  const auto ckpt = unet::load_checkpoint(ckpt_path);
  const DataDir d = load_data(data_dir);
  const auto days = lwt::selected_days(read_json(days_file));
  const fs::path split_path = ckpt_path.parent_path() / "split.json";
  std::vector<data::PatchIndex> patches;
  if (which == "all") {
    patches = data::make_patches(d.layers.width(), d.layers.height(), ckpt.model.config().input_size);
  } else {
    const auto all = read_split_patches(split_path);
    const data::Split s = which == "test" ? data::Split::test : which == "val" ? data::Split::val : data::Split::train;
    patches = data::patches_in(all, s);
  }
  if (patches.empty()) throw DataError("predict: no " + which + " patches to predict");
  log(LogLevel::info, "predict " + std::to_string(patches.size()) + " " + which + " patches over " +
                          std::to_string(days.size()) + " days with " + ckpt_path.string());
  data::GridStack stack;
  for (data::Date day : days) {
    stack.dates.push_back(day);
    stack.grids.push_back(unet::predict_day(ckpt.model, ckpt.manifest, d.layers, d.met, patches, day));
    log(LogLevel::debug, "predicted " + data::format_date(day));
  }
  data::write_stack(out, stack);
  return kExitOk;
}

// ---- eval ----

int cmd_eval(const fs::path& pred, const fs::path& truth, const fs::path& stations_file, const fs::path& out,
             const std::optional<fs::path>& aggregate_dir, double mape_epsilon) {
  const auto dates = data::stack_dates(pred);
  if (dates.empty()) throw DataError("eval: no prediction days under " + pred.string());
  const auto a = data::read_stack(pred, dates);
  const auto b = data::read_stack(truth, dates);
  const auto stations = eval::read_stations(stations_file);
  const auto rows = eval::station_report(stations, a, b, mape_epsilon);
  data::write_file(out, eval::report_csv(rows));
  log(LogLevel::info, "eval: " + std::to_string(rows.size()) + " report rows over " + std::to_string(dates.size()) +
                          " days");
  if (aggregate_dir) {
    const auto agg_a = eval::hourly_aggregate(a);
    const auto agg_b = eval::hourly_aggregate(b);
    for (int h = 0; h < 24; ++h) {
      char name[16];
      std::snprintf(name, sizeof name, "h%02d.grd", h);
      data::write_grd1(*aggregate_dir / "model" / name, agg_a[static_cast<std::size_t>(h)]);
      data::write_grd1(*aggregate_dir / "reference" / name, agg_b[static_cast<std::size_t>(h)]);
    }
  }
  return kExitOk;
}

// ---- hotspot ----

int cmd_hotspot(const fs::path& pred, const fs::path& out, double epsilon, const std::optional<fs::path>& days_file) {
  const auto dates = days_file ? lwt::selected_days(read_json(*days_file)) : data::stack_dates(pred);
  if (dates.empty()) throw DataError("hotspot: no days under " + pred.string());
  const auto stack = data::read_stack(pred, dates);
  const auto maps = hotspot::trel_daily_cycle(stack.grids, epsilon);
  hotspot::write_trel_maps(out, maps, epsilon, dates.size());
  log(LogLevel::info, "hotspot: 24 maps over " + std::to_string(dates.size()) + " days");
  return kExitOk;
}

// ---- plot ----

int cmd_plot(const std::vector<fs::path>& inputs, const fs::path& out, std::optional<double> lo,
             std::optional<double> hi) {
  std::vector<std::pair<std::string, data::RasterGrid>> grids;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".grd") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        std::string stem = fs::relative(f, in).replace_extension().generic_string();
        std::replace(stem.begin(), stem.end(), '/', '_');
        grids.emplace_back(stem, data::read_grd1(f));
      }
    } else {
      grids.emplace_back(in.stem().string(), data::read_grd1(in));
    }
  }
  if (grids.empty()) throw DataError("plot: no .grd inputs");
  std::vector<data::RasterGrid> all;
  for (const auto& g : grids) all.push_back(g.second);
  ColorScale scale = (lo && hi) ? ColorScale{*lo, *hi} : common_scale(all);
  if (lo) scale.min = *lo;
  if (hi) scale.max = *hi;
  if (!(scale.max >= scale.min)) throw ConfigError("plot: --max must be >= --min");
  emit_plots(grids, out, scale);
  return kExitOk;
}

// ---- serve ----

int cmd_serve(const std::optional<fs::path>& ckpt, const fs::path& store, const std::string& host, int port) {
  std::optional<fs::path> file;
  if (ckpt) file = checkpoint_file(*ckpt);
  const auto svc = service::Service::open(file, store);
  log(LogLevel::info, "serving on " + host + ":" + std::to_string(port) + (file ? " with " + file->string() : " without a model"));
  service::serve(svc, host, port);
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UsageError*>(&e) ||
      dynamic_cast<const ParameterError*>(&e)) {
    return kExitUsage;
  }
  return kExitData;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"uhinet: urban air-temperature U-Net toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override every seed in the configs");

  std::optional<fs::path> config;
  fs::path out;
  fs::path data_dir;
  fs::path days_file;
  fs::path ckpt;

  auto* synth = app.add_subcommand("synth", "Generate the synthetic world");
  std::optional<fs::path> stations_spec;
  synth->add_option("--config", config, "synth.json");
  synth->add_option("--out", out, "Output data directory")->required();
  synth->add_option("--stations", stations_spec, "Station list; writes synthetic measurements for them");

  auto* lwt_cmd = app.add_subcommand("lwt", "Classify days into weather types and select the target days");
  lwt_cmd->add_option("--data", data_dir, "Data directory")->required();
  lwt_cmd->add_option("--config", config, "lwt.json");
  lwt_cmd->add_option("--out", out, "Output lwt.json")->required();

  auto* train_cmd = app.add_subcommand("train", "Train the U-Net");
  train_cmd->add_option("--data", data_dir, "Data directory")->required();
  train_cmd->add_option("--days", days_file, "lwt.json with the selected days")->required();
  train_cmd->add_option("--config", config, "train.json");
  train_cmd->add_option("--out", out, "Checkpoint directory")->required();

  auto* predict_cmd = app.add_subcommand("predict", "Predict hourly grids for the selected days");
  std::string which = "test";
  predict_cmd->add_option("--data", data_dir, "Data directory")->required();
  predict_cmd->add_option("--ckpt", ckpt, "Checkpoint file or directory")->required();
  predict_cmd->add_option("--days", days_file, "lwt.json with the selected days")->required();
  predict_cmd->add_option("--patches", which, "Patches to predict")->check(CLI::IsMember({"test", "val", "train", "all"}));
  predict_cmd->add_option("--out", out, "Prediction stack directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Station metrics between predictions and the reference");
  fs::path pred;
  fs::path truth;
  fs::path stations_file;
  std::optional<fs::path> aggregate_dir;
  double mape_epsilon = eval::kDefaultMapeEpsilon;
  eval_cmd->add_option("--pred", pred, "Prediction stack")->required();
  eval_cmd->add_option("--truth", truth, "Reference stack")->required();
  eval_cmd->add_option("--stations", stations_file, "stations.json")->required();
  eval_cmd->add_option("--out", out, "report.csv")->required();
  eval_cmd->add_option("--aggregate", aggregate_dir, "Write hourly mean grids of both stacks here");
  eval_cmd->add_option("--mape-epsilon", mape_epsilon, "Exclude MAPE terms with |observed| below this");

  auto* hotspot_cmd = app.add_subcommand("hotspot", "Relative-temperature hotspot maps per hour");
  double epsilon = hotspot::kDefaultEpsilon;
  std::optional<fs::path> hotspot_days;
  hotspot_cmd->add_option("--pred", pred, "Prediction stack")->required();
  hotspot_cmd->add_option("--out", out, "Output directory")->required();
  hotspot_cmd->add_option("--epsilon", epsilon, "Mask pixels with |T_a| below this (degC)");
  hotspot_cmd->add_option("--days", hotspot_days, "Restrict to the days of an lwt.json");

  auto* plot_cmd = app.add_subcommand("plot", "PPM heatmaps of GRD1 grids");
  std::vector<fs::path> plot_inputs;
  std::optional<double> plot_min;
  std::optional<double> plot_max;
  plot_cmd->add_option("--in", plot_inputs, "Grid files or directories")->required();
  plot_cmd->add_option("--out", out, "Output directory")->required();
  plot_cmd->add_option("--min", plot_min, "Fixed lower end of the color scale");
  plot_cmd->add_option("--max", plot_max, "Fixed upper end of the color scale");

  auto* serve_cmd = app.add_subcommand("serve", "HTTP what-if service");
  std::optional<fs::path> serve_ckpt;
  fs::path store = "scenarios";
  std::string host = "127.0.0.1";
  int port = 8080;
  serve_cmd->add_option("--ckpt", serve_ckpt, "Checkpoint file or directory");
  serve_cmd->add_option("--store", store, "Scenario directory");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    log_level();
    if (synth->parsed()) return cmd_synth(config, out, stations_spec, seed);
    if (lwt_cmd->parsed()) return cmd_lwt(data_dir, config, out, seed);
    if (train_cmd->parsed()) return cmd_train(data_dir, days_file, config, out, seed);
    if (predict_cmd->parsed()) return cmd_predict(data_dir, ckpt, days_file, which, out);
    if (eval_cmd->parsed()) return cmd_eval(pred, truth, stations_file, out, aggregate_dir, mape_epsilon);
    if (hotspot_cmd->parsed()) return cmd_hotspot(pred, out, epsilon, hotspot_days);
    if (plot_cmd->parsed()) return cmd_plot(plot_inputs, out, plot_min, plot_max);
    if (serve_cmd->parsed()) return cmd_serve(serve_ckpt, store, host, port);
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    std::cerr << "uhinet: " << e.what() << "\n";
    return code;
  }
  return kExitUsage;
}

}  // namespace uhinet::cli
