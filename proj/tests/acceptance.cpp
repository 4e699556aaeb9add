// Runs every primary acceptance criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Optional arguments select criteria by name.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "support.hpp"
#include "uhinet/datapipe/examples.hpp"
#include "uhinet/datapipe/synth.hpp"
#include "uhinet/eval/eval.hpp"
#include "uhinet/hotspot/hotspot.hpp"
#include "uhinet/lwt/lwt.hpp"
#include "uhinet/unet/inference.hpp"
#include "uhinet/unet/model.hpp"
#include "uhinet/unet/train.hpp"

namespace fs = std::filesystem;
using namespace uhinet;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [FAILED]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const data::SynthWorld& world() {
  static const data::SynthWorld w{data::SynthWorldConfig{}};
  return w;
}

const std::vector<data::Date>& target_days() {
  static const std::vector<data::Date> days = [] {
    const auto& met = world().met();
    const auto baseline =
        lwt::daily_metrics_range(met, data::parse_date("2015-01-01"), data::parse_date("2015-12-31"));
    const auto period = lwt::daily_metrics_range(met, data::parse_date("2016-07-01"), data::parse_date("2016-08-31"));
    const auto assignment = lwt::cluster_lwt(baseline, 12, 1);
    return lwt::select_target_lwt(assignment, baseline, period).days;
  }();
  return days;
}

std::vector<data::PatchIndex> default_split() {
  return data::split_patches(data::make_patches(world().layers().width(), world().layers().height()),
                             data::SplitSpec{});
}

// ---- gradients ----

Outcome gradients() {
  using testing::check_graph;
  using testing::random_tensor;
  using testing::T64;
  namespace n = num;
  Outcome o;
  const auto t0 = Clock::now();

  auto relu_input = [] {
    T64 x = random_tensor<double>({4, 6, 3}, 14);
    for (auto& v : x.storage()) v += v > 0 ? 0.1 : -0.1;
    return x;
  };
  const std::vector<std::pair<const char*, std::function<double()>>> layers = {
      {"conv2d same", [] {
         return check_graph([](auto& t, auto& v) { return n::conv2d<double>(t, v[0], v[1], v[2], 1, n::Padding::same); },
                            {random_tensor<double>({2, 6, 6, 2}, 1), random_tensor<double>({3, 3, 2, 3}, 2),
                             random_tensor<double>({3}, 3)});
       }},
      {"conv2d stride 2", [] {
         return check_graph([](auto& t, auto& v) { return n::conv2d<double>(t, v[0], v[1], v[2], 2, n::Padding::same); },
                            {random_tensor<double>({2, 5, 6, 2}, 4), random_tensor<double>({3, 3, 2, 2}, 5),
                             random_tensor<double>({2}, 6)});
       }},
      {"conv2d valid", [] {
         return check_graph(
             [](auto& t, auto& v) { return n::conv2d<double>(t, v[0], v[1], v[2], 1, n::Padding::valid); },
             {random_tensor<double>({5, 5, 1}, 7), random_tensor<double>({3, 3, 1, 2}, 8), random_tensor<double>({2}, 9)});
       }},
      {"conv2d_transpose stride 2", [] {
         return check_graph([](auto& t, auto& v) { return n::conv2d_transpose<double>(t, v[0], v[1], v[2], 2); },
                            {random_tensor<double>({2, 3, 3, 2}, 10), random_tensor<double>({3, 3, 2, 3}, 11),
                             random_tensor<double>({3}, 12)});
       }},
      {"conv2d_transpose stride 1", [] {
         return check_graph([](auto& t, auto& v) { return n::conv2d_transpose<double>(t, v[0], v[1], v[2], 1); },
                            {random_tensor<double>({4, 4, 3}, 13), random_tensor<double>({3, 3, 3, 2}, 14),
                             random_tensor<double>({2}, 15)});
       }},
      {"max_pool2", [] {
         return check_graph([](auto& t, auto& v) { return n::max_pool2<double>(t, v[0]); },
                            {random_tensor<double>({2, 6, 4, 3}, 16)});
       }},
      {"relu", [&] { return check_graph([](auto& t, auto& v) { return n::relu<double>(t, v[0]); }, {relu_input()}); }},
      {"dense", [] {
         return check_graph([](auto& t, auto& v) { return n::dense<double>(t, v[0], v[1], v[2]); },
                            {random_tensor<double>({3, 7}, 17), random_tensor<double>({7, 4}, 18),
                             random_tensor<double>({4}, 19)});
       }},
      {"dropout", [] {
         return check_graph(
             [](auto& t, auto& v) {
               Rng rng(5);
               return n::dropout<double>(t, v[0], 0.2, rng, true);
             },
             {random_tensor<double>({40}, 20)});
       }},
      {"concat_last + reshape", [] {
         return check_graph(
             [](auto& t, auto& v) {
               auto c = n::concat_last<double>(t, v[0], v[1]);
               return n::reshape<double>(t, c, n::Shape{2, 15});
             },
             {random_tensor<double>({2, 3, 2}, 21), random_tensor<double>({2, 3, 3}, 22)});
       }},
      {"mse_loss", [] {
         return check_graph([](auto& t, auto& v) { return n::mse_loss<double>(t, v[0], v[1]); },
                            {random_tensor<double>({2, 5}, 23), random_tensor<double>({2, 5}, 24)});
       }},
  };
  double worst_layer = 0;
  std::string worst_name;
  for (const auto& [name, fn] : layers) {
    const double e = fn();
    if (e >= worst_layer) {
      worst_layer = e;
      worst_name = name;
    }
  }
  o.require(worst_layer < 1e-4, "worst layer rel err " + fmt("%.2e", worst_layer) + " (" + worst_name + ") < 1e-4");

  // Full network at its default size, 64-bit, dropout active with a fixed mask.
  const unet::UNet64 model = unet::UNet::build(unet::UNetConfig{}).cast<double>();
  const auto x = random_tensor<double>({2, 32, 32, 3}, 31);
  const auto met = random_tensor<double>({2, 3, 5}, 32);
  const auto target = random_tensor<double>({2, 32, 32, 1}, 33);
  auto evaluate = [&](const unet::UNet64& m, std::vector<T64>* grads) {
    num::GradTape<double> tape;
    Rng rng(7);
    auto out = m.forward(tape, tape.input(x), tape.input(met), true, rng);
    auto loss = num::mse_loss(tape, out, tape.input(target));
    const double v = tape.value(loss).item();
    if (grads) *grads = tape.backward(loss, m.parameters().size());
    return v;
  };
  std::vector<T64> grads;
  evaluate(model, &grads);
  Rng pick(99);
  double worst_model = 0;
  std::size_t probed = 0;
  for (std::size_t s = 0; s < model.parameters().size(); ++s) {
    const std::vector<double> point(model.parameters()[s].storage());
    std::vector<std::size_t> coords;
    for (int k = 0; k < 2; ++k) coords.push_back(pick.index(point.size()));
    auto f = [&, s](std::span<const double> p) {
      unet::UNet64 probe = model;
      std::copy(p.begin(), p.end(), probe.parameters()[s].storage().begin());
      return evaluate(probe, nullptr);
    };
    const auto r = num::finite_diff_check(f, point, grads[s].storage(), 1e-6, coords);
    worst_model = std::max(worst_model, r.max_relative_error);
    probed += r.checked;
  }
  o.require(worst_model < 1e-3, "full model rel err " + fmt("%.2e", worst_model) + " over " + std::to_string(probed) +
                                    " coords in every parameter tensor < 1e-3");
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime " + fmt("%.1f", secs) + " s < 60 s");
  return o;
}

// ---- overfit ----

Outcome overfit() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto train_patches = data::patches_in(default_split(), data::Split::train);
  const std::vector<data::PatchIndex> four(train_patches.begin(), train_patches.begin() + 4);
  const std::vector<data::Date> day{target_days().front()};
  const auto provider = world().provider();
  const auto manifest = data::fit_training_manifest(world().layers(), four, world().met(), provider, day);
  const auto examples = data::assemble_examples(four, world().layers(), world().met(), provider, day, manifest);
  const auto& range = manifest.at(data::var::target);
  const double to_celsius = (range.max - range.min) / 2.0;

  unet::UNetConfig cfg;
  cfg.lr = 1e-3;
  cfg.dropout_rate = 0.0;
  const std::size_t steps_per_epoch = (examples.size() + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t max_epochs = 2000 / steps_per_epoch;
  const std::size_t chunk = 5;

  unet::UNet model = unet::UNet::build(cfg);
  unet::TrainerState state = unet::TrainerState::fresh(model);
  const double initial = unet::evaluate_loss(model, examples);
  std::cerr << "  overfit: setup done, " << examples.size() << " examples, initial " << initial << " (" << seconds_since(t0) << " s)\n";
  std::vector<double> epoch_losses;
  double rmse = 0;
  double loss = initial;
  while (state.epoch < max_epochs) {
    cfg.epochs = std::min(max_epochs, state.epoch + chunk);
    unet::UNet next = unet::UNet::zeros(cfg);
    next.parameters() = std::move(model.parameters());
    model = std::move(next);
    for (const auto& e : unet::train(model, state, examples, {}).epochs) epoch_losses.push_back(e.train_loss);
    loss = unet::evaluate_loss(model, examples);
    rmse = std::sqrt(loss) * to_celsius;
    std::cerr << "  overfit: epoch " << state.epoch << " step " << state.step << " rmse " << rmse << " degC loss/initial " << loss / initial << " (" << seconds_since(t0) << " s)\n";
    if (rmse < 0.3 && loss < 0.01 * initial) break;
  }
  const double secs = seconds_since(t0);
  o.require(rmse < 0.3, "train RMSE " + fmt("%.3f", rmse) + " degC < 0.3 after " + std::to_string(state.step) +
                            " steps (<= 2000)");
  o.require(loss < 0.01 * initial, "final/initial loss " + fmt("%.4f", loss / initial) + " < 0.01");
  const std::size_t k = std::min<std::size_t>(5, epoch_losses.size());
  const double first = std::accumulate(epoch_losses.begin(), epoch_losses.begin() + k, 0.0) / k;
  const double last = std::accumulate(epoch_losses.end() - k, epoch_losses.end(), 0.0) / k;
  o.require(last < first, "mean loss of last 5 epochs " + fmt("%.2e", last) + " < first 5 " + fmt("%.2e", first));
  o.require(secs < 300.0, "runtime " + fmt("%.1f", secs) + " s < 300 s");
  return o;
}

// ---- generalization ----

Outcome generalization() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto all_days = target_days();
  o.require(all_days.size() >= 16, std::to_string(all_days.size()) + " target-type days available (>= 16)");
  if (all_days.size() < 16) return o;
  const std::vector<data::Date> days(all_days.begin(), all_days.begin() + 16);
  const auto patches = default_split();
  const auto train_patches = data::patches_in(patches, data::Split::train);
  const auto test_patches = data::patches_in(patches, data::Split::test);
  o.require(train_patches.size() == 48 && test_patches.size() == 6, "48 train / 6 test patches");

  const auto provider = world().provider();
  const auto manifest = data::fit_training_manifest(world().layers(), train_patches, world().met(), provider, days);
  const auto train_set = data::assemble_examples(train_patches, world().layers(), world().met(), provider, days, manifest);

  unet::UNetConfig cfg;
  cfg.base_channels = 16;
  cfg.dropout_rate = 0.05;
  cfg.lr = 1e-3;
  cfg.dropout_rate = 0.0;
  cfg.batch_size = 32;
  cfg.epochs = 2;
  unet::UNet model = unet::UNet::build(cfg);
  unet::TrainerState state = unet::TrainerState::fresh(model);
  unet::train(model, state, train_set, {});

  std::vector<eval::ReportRow> rows;
  double worst_pearson = 1.0;
  double worst_mae = 0.0;
  for (const auto& p : test_patches) {
    std::vector<double> truth;
    std::vector<double> pred;
    for (const data::Date d : days) {
      const auto grids = unet::predict_day(model, manifest, world().layers(), world().met(), {p}, d);
      for (int h = 0; h < 24; ++h) {
        const auto oracle = world().oracle(d, h, false);
        for (std::size_t y = p.row0; y < p.row0 + p.size; ++y) {
          for (std::size_t x = p.col0; x < p.col0 + p.size; ++x) {
            truth.push_back(oracle.at(x, y));
            pred.push_back(grids[h].at(x, y));
          }
        }
      }
    }
    const auto m = eval::regression_metrics(truth, pred);
    rows.push_back({"patch_" + std::to_string(p.id), "model-vs-oracle", m});
    worst_pearson = std::min(worst_pearson, m.pearson.value_or(0.0));
    worst_mae = std::max(worst_mae, m.mae);
  }
  std::cout << eval::report_csv(rows);
  const double secs = seconds_since(t0);
  o.require(worst_pearson >= 0.95, "min per-patch Pearson " + fmt("%.4f", worst_pearson) + " >= 0.95");
  o.require(worst_mae <= 1.0, "max per-patch MAE " + fmt("%.3f", worst_mae) + " degC <= 1.0");
  o.require(secs <= 1800.0, "runtime " + fmt("%.1f", secs) + " s <= 1800 s");
  return o;
}

// ---- hotspot ----

Outcome hotspot_oracle() {
  Outcome o;
  Rng rng(2024);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int days = 1 + static_cast<int>(rng.index(5));
    std::vector<std::vector<data::RasterGrid>> stack(days);
    for (auto& d : stack) {
      for (int h = 0; h < 24; ++h) {
        auto g = data::RasterGrid::filled(8, 8, data::Units::celsius);
        for (auto& v : g.values) v = static_cast<float>(rng.uniform(-5.0, 40.0));
        d.push_back(g);
      }
    }
    const auto maps = hotspot::trel_daily_cycle(stack, 0.5);
    for (int h = 0; h < 24; ++h) {
      std::vector<data::RasterGrid> hour;
      for (const auto& d : stack) hour.push_back(d[h]);
      const auto expect = testing::brute_force_trel(hour, 0.5);
      for (std::size_t i = 0; i < expect.size(); ++i) {
        const bool masked = std::isnan(expect[i]);
        if (masked != (maps[h].valid[i] == 0) || (!masked && maps[h].value[i] != expect[i])) ++mismatches;
      }
    }
  }
  o.require(mismatches == 0, "50 random 8x8 stacks equal the brute-force oracle exactly (" +
                                 std::to_string(mismatches) + " mismatches)");

  bool zero = true;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::vector<data::RasterGrid>> stack(
        3, std::vector<data::RasterGrid>(24, data::RasterGrid::filled(8, 8, data::Units::celsius,
                                                                      static_cast<float>(rng.uniform(1, 40)))));
    for (const auto& m : hotspot::trel_daily_cycle(stack)) {
      for (std::size_t i = 0; i < m.value.size(); ++i) zero = zero && m.valid[i] && m.value[i] == 0.0;
    }
  }
  o.require(zero, "uniform stacks give all-zero maps");

  auto g = data::RasterGrid::filled(3, 3, data::Units::celsius, 27.0F);
  g.at(1, 1) = 30.0F;
  const double v = hotspot::trel_hour({g}).value[4];
  o.require(std::abs(v - 10.0) < 1e-12, "centre 30 among 27s gives " + fmt("%.12f", v));
  return o;
}

// ---- metrics ----

Outcome metrics_oracle() {
  Outcome o;
  Rng rng(77);
  double worst = 0;
  bool ordered = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.index(500);
    std::vector<double> y(n);
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.uniform(1.0, 40.0);
      p[i] = y[i] + rng.normal(0.0, 2.0);
    }
    const auto m = eval::regression_metrics(y, p);
    const auto ref = testing::naive_metrics(y, p);
    worst = std::max({worst, std::abs(*m.pearson - ref.pearson), std::abs(m.rmse - ref.rmse),
                      std::abs(m.mae - ref.mae), std::abs(*m.mape - ref.mape)});
    ordered = ordered && m.rmse >= m.mae;
  }
  o.require(worst <= 1e-12, "max deviation from naive formulas " + fmt("%.2e", worst) + " <= 1e-12 on 100 pairs");
  o.require(ordered, "RMSE >= MAE on every pair");
  return o;
}

// ---- lwt ----

Outcome lwt_criteria() {
  Outcome o;
  const std::vector<std::pair<double, lwt::Sector>> table = {
      {0, lwt::Sector::N}, {90, lwt::Sector::E}, {180, lwt::Sector::S}, {270, lwt::Sector::W}, {350, lwt::Sector::N}};
  bool sectors = true;
  for (const auto& [deg, s] : table) sectors = sectors && lwt::classify_wind_direction(deg) == s;
  o.require(sectors, "sector table 0:N 90:E 180:S 270:W 350:N");

  const auto baseline =
      lwt::daily_metrics_range(world().met(), data::parse_date("2015-01-01"), data::parse_date("2015-12-31"));
  const auto a = lwt::cluster_lwt(baseline, 12, 1);
  std::vector<int> planted;
  for (const auto& f : baseline) planted.push_back(world().day(f.date).weather_type);
  const double ari = testing::adjusted_rand_index(planted, a.labels);
  o.require(ari > 0.9, "planted 12-type recovery ARI " + fmt("%.4f", ari) + " > 0.9");

  const auto patch = data::make_patches(256, 256).at(9);
  std::vector<data::Date> days;
  for (int i = 0; i < 164; ++i) days.push_back(data::parse_date("2016-04-01") + std::chrono::days(i));
  const auto provider = world().provider(false);
  const auto manifest = data::fit_training_manifest(world().layers(), {patch}, world().met(), provider, days);
  const auto ex = data::assemble_examples({patch}, world().layers(), world().met(), provider, days, manifest);
  o.require(ex.size() == 3936, "1 patch x 164 days gives " + std::to_string(ex.size()) + " examples (3936)");
  return o;
}

// ---- determinism ----

int run_cli(const std::string& args) {
  const std::string cmd = std::string("UHINET_LOG=error '") + UHINET_EXE + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = data::read_file(e.path());
  }
  return out;
}

Outcome determinism() {
  Outcome o;
  const fs::path configs = UHINET_CONFIG_DIR;
  auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
  auto pipeline = [&](const fs::path& dir) {
    const std::vector<std::string> stages = {
        "synth --config " + q(configs / "tiny_synth.json") + " --stations " + q(configs / "tiny_stations.json") +
            " --out " + q(dir / "data"),
        "lwt --data " + q(dir / "data") + " --config " + q(configs / "tiny_lwt.json") + " --out " + q(dir / "lwt.json"),
        "train --data " + q(dir / "data") + " --days " + q(dir / "lwt.json") + " --config " +
            q(configs / "tiny_train.json") + " --out " + q(dir / "ckpt"),
        "predict --data " + q(dir / "data") + " --ckpt " + q(dir / "ckpt") + " --days " + q(dir / "lwt.json") +
            " --out " + q(dir / "pred"),
        "eval --pred " + q(dir / "pred") + " --truth " + q(dir / "data/oracle") + " --stations " +
            q(dir / "data/stations.json") + " --aggregate " + q(dir / "agg") + " --out " + q(dir / "report.csv"),
        "hotspot --pred " + q(dir / "pred") + " --out " + q(dir / "hot"),
        "plot --in " + q(dir / "hot") + " " + q(dir / "agg/model") + " --out " + q(dir / "plots"),
    };
    for (const auto& s : stages) {
      if (run_cli(s) != 0) return s.substr(0, s.find(' '));
    }
    return std::string();
  };
  testing::TempDir a("accept-a");
  testing::TempDir b("accept-b");
  const std::string fa = pipeline(a.path());
  const std::string fb = pipeline(b.path());
  o.require(fa.empty() && fb.empty(), "all seven stages succeed" + (fa.empty() ? "" : " (" + fa + " failed)"));
  const auto ta = tree(a.path());
  const auto tb = tree(b.path());
  std::size_t differing = ta.size() == tb.size() ? 0 : 1;
  for (const auto& [name, bytes] : ta) {
    auto it = tb.find(name);
    if (it == tb.end() || it->second != bytes) ++differing;
  }
  std::set<std::string> kinds;
  for (const auto& [name, bytes] : ta) kinds.insert(fs::path(name).extension().string());
  std::string kind_list;
  for (const auto& k : kinds) kind_list += (kind_list.empty() ? "" : " ") + k;
  o.require(differing == 0 && !ta.empty(), std::to_string(ta.size()) + " files (" + kind_list +
                                               ") byte-identical across two runs, " + std::to_string(differing) +
                                               " differ");
  return o;
}

// ---- normalization ----

Outcome normalization() {
  Outcome o;
  Rng rng(1);
  double worst = 0;
  bool endpoints = true;
  for (int i = 0; i < 100000; ++i) {
    const double lo = rng.uniform(-1000, 1000);
    const data::VariableRange r{lo, lo + rng.uniform(1e-3, 2000)};
    const double x = rng.uniform(lo - 500, lo + 2500);
    worst = std::max(worst, std::abs(data::denormalize(data::normalize(x, r), r) - x));
    endpoints = endpoints && data::normalize(r.min, r) == -1.0 && data::normalize(r.max, r) == 1.0;
  }
  o.require(worst <= 1e-9, "round-trip max error " + fmt("%.2e", worst) + " <= 1e-9");
  o.require(endpoints, "min -> -1 and max -> +1 exactly on 100000 ranges");

  const auto base = data::make_patches(256, 256);
  const std::vector<data::Date> days(target_days().begin(), target_days().begin() + 2);
  data::SplitSpec s1;
  s1.train = {0, 9, 20};
  s1.test = {5};
  data::SplitSpec s2 = s1;
  s2.test = {5, 6, 30, 63};
  s2.val = {1};
  const auto provider = world().provider();
  const auto m1 = data::fit_training_manifest(
      world().layers(), data::patches_in(data::split_patches(base, s1), data::Split::train), world().met(), provider, days);
  const auto m2 = data::fit_training_manifest(
      world().layers(), data::patches_in(data::split_patches(base, s2), data::Split::train), world().met(), provider, days);
  o.require(m1.to_json().dump() == m2.to_json().dump(), "manifest unchanged when test and val sets change");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradients", gradients},         {"hotspot", hotspot_oracle}, {"metrics", metrics_oracle},
      {"normalization", normalization}, {"lwt", lwt_criteria},       {"determinism", determinism},
      {"overfit", overfit},             {"generalization", generalization},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << " ["
              << fmt("%.1f", seconds_since(t0)) << " s]" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
