#include <doctest.h>
#include <json.hpp>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "boxlike/cli.hpp"
#include "boxlike/config.hpp"
#include "boxlike/error.hpp"

using namespace boxlike;
namespace fs = std::filesystem;

namespace {

const std::string kConfigDir = BOXLIKE_CONFIG_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return kConfigDir + "/" + name; }

// A config file in the temp directory, removed on scope exit.
class TempConfig {
 public:
  explicit TempConfig(const std::string& text) {
    static int counter = 0;
    path_ = (fs::temp_directory_path() / ("boxlike-test-" + std::to_string(::getpid()) + "-" +
                                          std::to_string(counter++) + ".yaml"))
                .string();
    std::ofstream(path_) << text;
  }
  ~TempConfig() { fs::remove(path_); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("shipped configs parse") {
  for (const char* name : {"example-mirrored.yaml", "uniform-thirds.yaml", "perkins.yaml", "okamoto-0.2.yaml",
                           "staircase.yaml", "beta-thirds.yaml"}) {
    CHECK_NOTHROW(load_config(config(name)));
  }
  const ModelConfig c = load_config(config("example-mirrored.yaml"));
  CHECK(c.breakpoints == std::vector<double>{0.0, 0.4, 0.6, 1.0});
  CHECK(c.law.family_name() == "mirrored-beta");
  CHECK(c.seed == 2025u);
  CHECK(c.trees == 2000);
}

TEST_CASE("config errors are line-anchored") {
  CHECK(error_line("partition: {uniform: 3}\nheightlaw:\n  family: iid_uniform\nbogus: 1\n") == 4);
  CHECK(error_line("partition: {uniform: 3}\nheightlaw:\n  family: okamoto\n  alpha: x\n") == 4);
  CHECK(error_line("partition: [0, 0.5, 0.4, 1]\nheightlaw:\n  family: iid_uniform\n") == 1);
  CHECK(error_line("partition: {uniform: 3}\nheightlaw:\n  family: nope\n") == 3);
  CHECK(error_line("partition: {uniform: 3}\nheightlaw:\n  family: iid_uniform\ndiagnose:\n  trees: -4\n") == 5);
  CHECK(error_line("partition: [0, 1\n") > 0);
  CHECK(error_line("partition: {uniform: 3}\nheightlaw:\n  family: deterministic\n  y: [0.5]\n") > 0);
  CHECK_THROWS_AS(load_config("/nonexistent/boxlike.yaml"), ConfigError);
}

TEST_CASE("default partition for the three-interval families") {
  const ModelConfig c = parse_config("heightlaw:\n  family: okamoto\n  alpha: 0.7\n");
  CHECK(c.partition().m() == 3);
  CHECK(c.partition().equal_lengths());
}

TEST_CASE("dim and phi reproduce the worked examples") {
  const Run d = run({"dim", "--config", config("example-mirrored.yaml")});
  REQUIRE(d.code == kExitOk);
  const auto j = nlohmann::json::parse(d.out);
  CHECK(j["dimension"]["s"].get<double>() == doctest::Approx(1.561).epsilon(1e-3));

  const Run u = run({"dim", "--config", config("uniform-thirds.yaml")});
  CHECK(nlohmann::json::parse(u.out)["dimension"]["s"].get<double>() == doctest::Approx(1.2619).epsilon(1e-4));

  TempConfig half("heightlaw:\n  family: okamoto\n  alpha: 0.5\n");
  const Run h = run({"dim", "--config", half.path()});
  CHECK(nlohmann::json::parse(h.out)["dimension"]["s"].get<double>() == 1.0);

  const Run p = run({"phi", "--config", config("example-mirrored.yaml")});
  const auto pj = nlohmann::json::parse(p.out);
  CHECK(pj["phi"]["phi"].get<double>() == doctest::Approx(0.455).epsilon(1e-3));
  CHECK(pj["phi"]["classification"] == "non-differentiable-a.e.");

  const auto uj = nlohmann::json::parse(run({"phi", "--config", config("uniform-thirds.yaml")}).out);
  CHECK(uj["phi"]["phi"].get<double>() < 0.0);
  CHECK(uj["phi"]["classification"] == "differentiable-a.e.");

  const Run s = run({"phi", "--config", config("staircase.yaml")});
  const auto sj = nlohmann::json::parse(s.out);
  CHECK(sj["phi"]["phi"] == "-inf");
  CHECK(sj["phi"]["classification"] == "differentiable-a.e.");
  CHECK(sj["validation"]["degenerate_height"] == true);

  const Run mc = run({"dim", "--config", config("beta-thirds.yaml")});
  CHECK(nlohmann::json::parse(mc.out).contains("sensitivity"));

  const Run csv = run({"phi", "--config", config("perkins.yaml"), "--format", "csv"});
  CHECK(csv.out.rfind("quantity,value\nphi,", 0) == 0);
}

TEST_CASE("JSON reports are byte-stable under re-serialization") {
  for (const char* cmd : {"dim", "phi"}) {
    const Run r = run({cmd, "--config", config("example-mirrored.yaml")});
    CHECK(nlohmann::ordered_json::parse(r.out).dump(2) + "\n" == r.out);
  }
  const Run b = run({"boxcount", "--config", config("perkins.yaml"), "--depth", "6"});
  CHECK(nlohmann::ordered_json::parse(b.out).dump(2) + "\n" == b.out);
}

TEST_CASE("simulate is deterministic given the seed") {
  const std::string cfg = config("uniform-thirds.yaml");
  const Run a = run({"simulate", "--config", cfg, "--seed", "5", "--depth", "4"});
  const Run b = run({"simulate", "--config", cfg, "--seed", "5", "--depth", "4"});
  const Run c = run({"simulate", "--config", cfg, "--seed", "6", "--depth", "4"});
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);

  const Run zero = run({"simulate", "--config", cfg, "--depth", "0", "--format", "csv"});
  CHECK(zero.out == "x,y\n0,0\n1,1\n");

  const Run drawn = run({"simulate", "--config", config("okamoto-0.2.yaml"), "--depth", "1"});
  CHECK(drawn.code == kExitOk);
}

TEST_CASE("a missing seed is drawn and reported") {
  TempConfig unseeded("partition: {uniform: 3}\nheightlaw:\n  family: iid_uniform\ndepth: 2\n");
  const Run r = run({"simulate", "--config", unseeded.path()});
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("seed: ") != std::string::npos);
}

TEST_CASE("simulate and render write SVG files") {
  const fs::path dir = fs::temp_directory_path() / ("boxlike-svg-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string svg = (dir / "first.svg").string();
  const Run r = run({"simulate", "--config", config("uniform-thirds.yaml"), "--depth", "1", "--svg", svg});
  CHECK(r.code == kExitOk);
  std::ifstream in(svg);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t diagonals = 0;
  for (std::size_t pos = text.find("<line"); pos != std::string::npos; pos = text.find("<line", pos + 1)) ++diagonals;
  CHECK(diagonals == 3);

  const Run render = run({"render", "--config", config("uniform-thirds.yaml"), "--depth", "1"});
  CHECK(render.out == text);
  fs::remove_all(dir);
}

TEST_CASE("boxcount commands") {
  const Run sq = run({"boxcount", "--unit-square"});
  REQUIRE(sq.code == kExitOk);
  CHECK(std::abs(nlohmann::json::parse(sq.out)["estimate"]["slope"].get<double>() - 2.0) < 0.02);

  const Run perkins = run({"boxcount", "--config", config("perkins.yaml")});
  const auto pj = nlohmann::json::parse(perkins.out);
  CHECK(std::abs(pj["estimate"]["slope"].get<double>() - 1.7712) < 0.05);
  CHECK(pj["theory"]["s"].get<double>() == doctest::Approx(1.7712).epsilon(1e-4));

  const Run flat = run({"boxcount", "--config", config("okamoto-0.2.yaml")});
  CHECK(std::abs(nlohmann::json::parse(flat.out)["estimate"]["slope"].get<double>() - 1.0) < 0.05);
}

TEST_CASE("exit codes") {
  CHECK(run({"dim"}).code == kExitConfig);
  CHECK(run({"dim", "--config", "/nonexistent.yaml"}).code == kExitConfig);
  CHECK(run({"dim", "--bogus-flag"}).code == kExitConfig);
  CHECK(run({"frobnicate"}).code == kExitConfig);

  TempConfig diagonal("partition: {uniform: 3}\nheightlaw:\n  family: deterministic\n  y: [0.3333333333333333, 0.6666666666666666]\n");
  const Run rejected = run({"phi", "--config", diagonal.path()});
  CHECK(rejected.code == kExitConfig);

  TempConfig huge("partition: {uniform: 3}\nheightlaw:\n  family: iid_uniform\nseed: 1\nnode_budget: 1000\n");
  CHECK(run({"simulate", "--config", huge.path(), "--depth", "9"}).code == kExitResource);

  TempConfig few("partition: {uniform: 3}\nheightlaw:\n  family: okamoto\n  alpha: 0.8\nseed: 1\ndepth: 6\n"
                 "boxcount:\n  scales: [0.1, 0.05]\n");
  CHECK(run({"boxcount", "--config", few.path()}).code == kExitFit);

  CHECK(run({"diagnose", "--config", config("example-mirrored.yaml"), "--depth", "2"}).code ==
        kExitInsufficientDepth);
}

TEST_CASE("diagnose passes on a deterministic law and flags a wrong s") {
  TempConfig perkins("partition: {uniform: 3}\nheightlaw:\n  family: okamoto\n  alpha: 0.8333333333333334\n"
                     "seed: 1\ndiagnose:\n  n_max: 5\n  trees: 20\n  sandwich_trees: 5\n  drift_paths: 20\n"
                     "  drift_steps: 300\n");
  const Run ok = run({"diagnose", "--config", perkins.path()});
  CHECK(ok.code == kExitOk);
  CHECK(nlohmann::json::parse(ok.out)["summary"]["pass"] == true);

  const Run uniform = run({"diagnose", "--config", config("uniform-thirds.yaml")});
  CHECK(uniform.code == kExitOk);

  const Run shifted = run({"diagnose", "--config", config("uniform-thirds.yaml"), "--s-offset", "0.2"});
  CHECK(shifted.code == kExitCheckFailed);
  const auto j = nlohmann::json::parse(shifted.out);
  CHECK(j["summary"]["statistical_pass"] == false);
  bool some_mean_flagged = false;
  for (const auto& lv : j["martingale"]["levels"]) some_mean_flagged |= lv["mean_ok"] == false;
  CHECK(some_mean_flagged);
}
