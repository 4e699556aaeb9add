#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <unistd.h>
#include <spawn.h>
#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "support.hpp"
#include "uhinet/datapipe/raster.hpp"

extern char** environ;

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kExe = UHINET_EXE;
const fs::path kConfigs = UHINET_CONFIG_DIR;

int run_cli(const std::string& args) {
  const std::string cmd = "UHINET_LOG=error '" + kExe + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Relative path -> bytes for every regular file under `root`.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = uhinet::data::read_file(e.path());
  }
  return out;
}

void pipeline(const fs::path& dir) {
  REQUIRE(run_cli("synth --config " + q(kConfigs / "tiny_synth.json") + " --stations " +
                 q(kConfigs / "tiny_stations.json") + " --out " + q(dir / "data")) == 0);
  REQUIRE(run_cli("lwt --data " + q(dir / "data") + " --config " + q(kConfigs / "tiny_lwt.json") + " --out " +
                 q(dir / "lwt.json")) == 0);
  REQUIRE(run_cli("train --data " + q(dir / "data") + " --days " + q(dir / "lwt.json") + " --config " +
                 q(kConfigs / "tiny_train.json") + " --out " + q(dir / "ckpt")) == 0);
  REQUIRE(run_cli("predict --data " + q(dir / "data") + " --ckpt " + q(dir / "ckpt") + " --days " +
                 q(dir / "lwt.json") + " --out " + q(dir / "pred")) == 0);
  REQUIRE(run_cli("eval --pred " + q(dir / "pred") + " --truth " + q(dir / "data/oracle") + " --stations " +
                 q(dir / "data/stations.json") + " --aggregate " + q(dir / "agg") + " --out " +
                 q(dir / "report.csv")) == 0);
  REQUIRE(run_cli("hotspot --pred " + q(dir / "pred") + " --out " + q(dir / "hot")) == 0);
  REQUIRE(run_cli("plot --in " + q(dir / "hot") + " --out " + q(dir / "plots")) == 0);
}

int free_port() {
  const int fd = socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
  socklen_t len = sizeof(addr);
  getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  close(fd);
  return ntohs(addr.sin_port);
}

struct ChildGuard {
  pid_t pid = 0;
  ~ChildGuard() {
    if (pid > 0) {
      kill(pid, SIGTERM);
      int status = 0;
      waitpid(pid, &status, 0);
    }
  }
};

pid_t spawn_server(const std::vector<std::string>& extra) {
  std::vector<std::string> args{kExe, "serve"};
  args.insert(args.end(), extra.begin(), extra.end());
  std::vector<char*> argv;
  for (auto& s : args) argv.push_back(s.data());
  argv.push_back(nullptr);
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 1, "/dev/null", O_WRONLY, 0);
  posix_spawn_file_actions_addopen(&actions, 2, "/dev/null", O_WRONLY, 0);
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, kExe.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  return rc == 0 ? pid : -1;
}

}  // namespace

TEST_CASE("the full pipeline is byte-for-byte deterministic") {
  testing::TempDir a("cli-a");
  testing::TempDir b("cli-b");
  pipeline(a.path());
  pipeline(b.path());
  const auto ta = tree(a.path());
  const auto tb = tree(b.path());
  CHECK(ta.size() > 100);
  REQUIRE(ta.size() == tb.size());
  for (const auto& [name, bytes] : ta) {
    REQUIRE_MESSAGE(tb.count(name), name);
    CHECK_MESSAGE(tb.at(name) == bytes, name);
  }
  for (const char* f : {"ckpt/model.ckpt", "ckpt/manifest.json", "ckpt/split.json", "ckpt/history.json",
                        "ckpt/baseline.json", "report.csv", "hot/index.json", "plots/scale.json", "lwt.json"}) {
    CHECK_MESSAGE(ta.count(f), f);
  }
  const std::string report = ta.at("report.csv");
  CHECK(report.rfind("station,comparison,pearson,rmse,mae,mape,n,excluded_mape_terms\n", 0) == 0);
  CHECK(std::count(report.begin(), report.end(), '\n') == 1 + 2 * 3);
  const auto hist = json::parse(ta.at("ckpt/history.json"));
  CHECK(hist.at("epochs").size() == 1);
  CHECK_FALSE(hist.at("epochs")[0].contains("seconds"));
  CHECK(ta.at("plots/h00.ppm").rfind("P6\n", 0) == 0);
}

TEST_CASE("a different seed changes the trained model") {
  testing::TempDir dir("cli-seed");
  REQUIRE(run_cli("synth --config " + q(kConfigs / "tiny_synth.json") + " --out " + q(dir / "data")) == 0);
  REQUIRE(run_cli("lwt --data " + q(dir / "data") + " --config " + q(kConfigs / "tiny_lwt.json") + " --out " +
                 q(dir / "lwt.json")) == 0);
  const std::string base = "train --data " + q(dir / "data") + " --days " + q(dir / "lwt.json") + " --config " +
                           q(kConfigs / "tiny_train.json");
  REQUIRE(run_cli(base + " --out " + q(dir / "c0")) == 0);
  REQUIRE(run_cli("--seed 5 " + base + " --out " + q(dir / "c5")) == 0);
  CHECK(uhinet::data::read_file(dir / "c0/model.ckpt") != uhinet::data::read_file(dir / "c5/model.ckpt"));
}

TEST_CASE("exit codes") {
  testing::TempDir dir("cli-exit");
  CHECK(run_cli("") == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("synth") == 1);
  CHECK(run_cli("--help") == 0);
  uhinet::data::write_file(dir / "bad.json", R"({"domian": 64})");
  CHECK(run_cli("synth --config " + q(dir / "bad.json") + " --out " + q(dir / "x")) == 1);
  uhinet::data::write_file(dir / "broken.json", "{");
  CHECK(run_cli("lwt --data " + q(dir / "nowhere") + " --config " + q(dir / "broken.json") + " --out " +
               q(dir / "l.json")) == 1);
  CHECK(run_cli("lwt --data " + q(dir / "nowhere") + " --out " + q(dir / "l.json")) == 2);
  CHECK(run_cli("hotspot --pred " + q(dir / "nowhere") + " --out " + q(dir / "h")) == 2);
  uhinet::data::write_file(dir / "m.ckpt", "UNETCKPT1\n{}\n");
  CHECK(run_cli("serve --ckpt " + q(dir / "m.ckpt") + " --store " + q(dir / "s") + " --port 1") != 0);
}

TEST_CASE("plot output") {
  testing::TempDir dir("cli-plot");
  auto g = uhinet::data::RasterGrid::filled(3, 2, uhinet::data::Units::celsius, 10.0F);
  g.at(2, 1) = 20.0F;
  g.set_nodata(0, 0);
  uhinet::data::write_grd1(dir / "in/g.grd", g);
  REQUIRE(run_cli("plot --in " + q(dir / "in/g.grd") + " --out " + q(dir / "out")) == 0);
  const std::string ppm = uhinet::data::read_file(dir / "out/g.ppm");
  const std::string header = "P6\n3 2\n255\n";
  REQUIRE(ppm.size() == header.size() + 18);
  CHECK(ppm.rfind(header, 0) == 0);
  const auto scale = json::parse(uhinet::data::read_file(dir / "out/scale.json"));
  CHECK(scale.at("min") == 10.0);
  CHECK(scale.at("max") == 20.0);
  const auto px = [&](int i) { return ppm.substr(header.size() + 3 * i, 3); };
  CHECK(px(1) != px(5));  // cold and hot ends differ
  CHECK(px(0) == std::string(3, static_cast<char>(scale.at("nodata_rgb")[0].get<int>())));
  REQUIRE(run_cli("plot --in " + q(dir / "in/g.grd") + " --out " + q(dir / "out2") + " --min 0 --max 40") == 0);
  CHECK(json::parse(uhinet::data::read_file(dir / "out2/scale.json")).at("max") == 40.0);
}

TEST_CASE("serve answers over HTTP") {
  testing::TempDir dir("cli-serve");
  const int port = free_port();
  const std::string port_s = std::to_string(port);
  const std::string store = (dir / "store").string();
  ChildGuard server{spawn_server({"--store", store, "--port", port_s})};
  REQUIRE(server.pid > 0);

  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(1);
  client.set_read_timeout(10);
  httplib::Result health;
  for (int i = 0; i < 100 && !health; ++i) {
    health = client.Get("/api/v1/health");
    if (!health) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

  json grid = json::array();
  for (int y = 0; y < 32; ++y) grid.push_back(std::vector<double>(32, 0.5));
  json lc = json::array();
  for (int y = 0; y < 32; ++y) lc.push_back(std::vector<int>(32, 2));
  json met = json::array();
  for (int i = 0; i < 3; ++i) met.push_back({22.0, 0.0, 10.0, 1.0, 0.0});
  const json body = {{"name", "http"}, {"layers", {{"imperviousness", grid}, {"elevation", grid}, {"landcover", lc}}},
                     {"met", met}};
  auto created = client.Post("/api/v1/scenarios", body.dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const auto id = json::parse(created->body).at("id").get<int>();
  auto got = client.Get("/api/v1/scenarios/" + std::to_string(id));
  REQUIRE(got);
  CHECK(json::parse(got->body).at("name") == "http");
  auto pred = client.Post("/api/v1/predict", json{{"scenario_id", id}}.dump(), "application/json");
  REQUIRE(pred);
  CHECK(pred->status == 503);
  auto gone = client.Delete("/api/v1/scenarios/" + std::to_string(id));
  REQUIRE(gone);
  CHECK(gone->status == 200);
  auto options = client.Options("/api/v1/scenarios");
  REQUIRE(options);
  CHECK(options->status == 204);

  // Busy port.
  CHECK(run_cli("serve --store " + q(dir / "other") + " --port " + port_s) == 1);
}
