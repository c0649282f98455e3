#include <sys/wait.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "obslab/app/experiments.hpp"
#include "testing.hpp"

using namespace obslab;
using namespace obslab::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("obslab_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json small_propagation() {
  return Json::parse(R"({"grid": {"half_extent": 32, "points": 1024},
    "params": {"splitstep": {"points": 128, "half_extent": 8}}})");
}

int run_binary(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + OBSLAB_CLI_PATH + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config defaults are echoed") {
  const auto c = parse_config(Json::object(), "uncertainty");
  CHECK(c.grid.dim == 1);
  CHECK(c.grid.points_per_axis == 1024);
  CHECK(c.seed == 0x5EED);
  CHECK(c.echo["grid"]["half_extent"] == 32.0);
  CHECK(c.echo["hamiltonian"]["kind"] == "free");
  CHECK(c.echo["resolved_engine"] == "multiplier");
  const auto o = parse_config(Json::object(), "uncertainty", Overrides{"dense", 7});
  CHECK(o.seed == 7);
  CHECK(o.plan().engine == Engine::dense);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"gird": {}})"), "uncertainty"), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"grid": {"points": 1023}})"), "uncertainty"), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"grid": {"dim": 4}})"), "uncertainty"), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"experiment": "enss"})"), "uncertainty"), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::object(), "no-such-thing"), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"hamiltonian": {"kind": "potential"}, "engine": "multiplier"})"),
                               "uncertainty"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"engine": "dense", "grid": {"points": 8192}})"), "uncertainty"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"hamiltonian": {"kind": "fractional", "exponent": 0.5}})"),
                               "uncertainty"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"grid": {"half_extent": "wide"}})"), "uncertainty"), ConfigError);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"params": [1, 2]})"), "uncertainty"), ConfigError);
}

TEST_CASE("config errors leave no output") {
  const auto dir = scratch("bad_params");
  std::string msg;
  const Json doc = Json::parse(R"({"params": {"radii": [1], "deltas": [1], "colapse_tolerance": 0.1}})");
  CHECK(run_command("uncertainty", doc, {}, dir, msg) == kExitError);
  CHECK(msg.find("colapse_tolerance") != std::string::npos);
  CHECK(!fs::exists(dir));

  const Json bad_times = Json::parse(R"({"params": {"times": [5, 3]}})");
  CHECK(run_command("minimal-velocity", bad_times, {}, dir, msg) == kExitError);
  CHECK(!fs::exists(dir));
}

TEST_CASE("csv formatting") {
  CHECK(format_csv_number(0.1) == "0.1");
  CHECK(format_csv_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_csv_number(1e-20) == "1e-20");
  CHECK(format_csv_number(-2.0) == "-2");
  CHECK(format_csv_number(std::numeric_limits<double>::infinity()) == "inf");

  Series empty;
  empty.name = "empty";
  empty.add_column("t", {});
  empty.add_column("value", {});
  CHECK(to_csv(empty) == "t,value\n");

  Series s;
  s.add_column("a", {1.0, 2.5});
  s.add_column("b", {1e-3, -4.0});
  CHECK(to_csv(s) == "a,b\n1,0.001\n2.5,-4\n");
  CHECK_THROWS_AS(s.add_column("c", {1.0}), Error);
}

TEST_CASE("field dumps are little-endian complex64") {
  const auto dir = scratch("dump");
  fs::create_directories(dir);
  const GridSpec g = make_grid(1, 1.0, 8);
  Field f = Field::zeros(g);
  f.values[0] = Complex(1.0, -2.0);
  write_field_dump(dir, {"f", f});
  const std::string bytes = slurp(dir / "f.bin");
  REQUIRE(bytes.size() == 8 * 8);
  float re, im;
  std::memcpy(&re, bytes.data(), 4);
  std::memcpy(&im, bytes.data() + 4, 4);
  CHECK(re == 1.0f);
  CHECK(im == -2.0f);
  CHECK(static_cast<unsigned char>(bytes[3]) == 0x3f);  // 1.0f = 0x3f800000, high byte last
  const Json side = Json::parse(slurp(dir / "f.json"));
  CHECK(side["dtype"] == "complex64");
  CHECK(side["shape"][0] == 8);
  fs::remove_all(dir);
}

TEST_CASE("exit codes and report layout") {
  const auto dir = scratch("propagation");
  std::string msg;
  CHECK(run_command("propagation", small_propagation(), {}, dir, msg) == kExitPass);
  const Json r = Json::parse(slurp(dir / "report.json"));
  CHECK(r["passed"] == true);
  CHECK(r["experiment"] == "propagation");
  CHECK(!r.contains("wall_clock_seconds"));
  CHECK(fs::exists(dir / "timing.json"));
  for (const auto& v : r["verdicts"]) {
    CHECK(v.contains("anchor"));
    CHECK(v.contains("gating"));
  }

  Json strict = small_propagation();
  strict["params"]["reference_tolerance"] = 1e-30;
  CHECK(run_command("propagation", strict, {}, dir, msg) == kExitFail);
  fs::remove_all(dir);
}

TEST_CASE("reports are deterministic") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const Json doc = Json::parse(R"({"grid": {"half_extent": 16, "points": 256},
    "params": {"radii": [0.5, 1, 2], "deltas": [0.5, 1, 2]}})");
  std::string msg;
  run_command("uncertainty", doc, {}, a, msg);
  run_command("uncertainty", doc, {}, b, msg);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "uncertainty_scan.csv") == slurp(b / "uncertainty_scan.csv"));
  CHECK(slurp(a / "uncertainty_scan.csv").find('\r') == std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("control run: zero target and dumps") {
  const auto dir = scratch("control");
  const Json doc = Json::parse(R"({"grid": {"half_extent": 32, "points": 256},
    "params": {"initial": {"center": -1, "momentum": 2}, "target": {"center": 2}, "stability_pairs": 2}})");
  std::string msg;
  const int code = run_command("control", doc, {}, dir, msg);
  CHECK(code == kExitPass);
  const Json r = Json::parse(slurp(dir / "report.json"));
  CHECK(r["results"]["zero_target"]["max_control_magnitude"] == 0.0);
  CHECK(r["results"]["zero_target"]["solution"]["cost"] == 0.0);
  CHECK(fs::file_size(dir / "control_h1.bin") == 256 * 8);
  CHECK(fs::exists(dir / "control_epsilon_path.csv"));
  fs::remove_all(dir);
}

TEST_CASE("command-line binary") {
  const auto dir = scratch("binary");
  const auto cfg = scratch("binary_cfg.json");
  {
    std::ofstream out(cfg);
    out << R"({"params": {"no_such_key": 1}})";
  }
  CHECK(run_binary("uncertainty --config " + cfg.string() + " --out " + dir.string()) == kExitError);
  CHECK(!fs::exists(dir));
  CHECK(run_binary("uncertainty --config /nonexistent.json --out " + dir.string()) == kExitError);
  CHECK(run_binary("frobnicate") == kExitError);
  {
    std::ofstream out(cfg);
    out << R"({"grid": {"half_extent": 16, "points": 256}, "params": {"radii": [1], "deltas": [1]}})";
  }
  const auto env_dir = scratch("binary_env");
  CHECK(run_binary("uncertainty --config " + cfg.string() + " --out " + dir.string(),
                   "OBSLAB_OUT=" + env_dir.string()) == kExitPass);
  CHECK(fs::exists(env_dir / "report.json"));
  CHECK(!fs::exists(dir));
  fs::remove_all(env_dir);
  fs::remove(cfg);
}
