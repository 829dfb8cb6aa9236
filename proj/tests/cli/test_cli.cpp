#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "btrv/cli/commands.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace btrv;

namespace {

const std::string kSrc = BTRV_SOURCE_DIR;
const std::string kDefault = kSrc + "/configs/default.json";
const std::string kExp1 = kSrc + "/configs/experiment1.json";
const std::string kExp2 = kSrc + "/configs/experiment2.json";
const std::string kReq = kSrc + "/configs/requirements.scope";

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "btrv");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("btrv_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == cli::kUsage);
  CHECK(invoke({"fly"}).code == cli::kUsage);
  CHECK(invoke({"run"}).code == cli::kUsage);
  CHECK(invoke({"run", kDefault, "--report", "xml"}).code == cli::kUsage);
  CHECK(invoke({"--help"}).code == cli::kOk);
  auto missing = invoke({"run", kSrc + "/configs/nope.json"});
  CHECK(missing.code == cli::kUsage);
  CHECK(contains(missing.err, "nope.json"));
}

TEST_CASE("nominal run exits 0 with both monitors running") {
  auto r = invoke({"run", kDefault});
  CHECK(r.code == cli::kOk);
  CHECK(contains(r.out, "phi1: running"));
  CHECK(contains(r.out, "phi2: running"));
  CHECK(r.err.empty());
}

TEST_CASE("experiment 1 from the command line") {
  auto r = invoke({"run", kExp1, "--report", "machine"});
  CHECK(r.code == cli::kViolation);
  CHECK(contains(r.err, "violation monitor=phi1 tick=4"));
  CHECK(contains(r.err, "channel=BatteryReader->BatteryLevel message=[<ok>,10]"));
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdicts"][0]["status"] == "violated");
  CHECK(j["verdicts"][0]["tick"] == 4);
  CHECK(j["verdicts"][1]["status"] == "running");
  CHECK(j["steps"] == 2000);
}

TEST_CASE("experiment 2 from the command line") {
  auto r = invoke({"run", kExp2, kReq});
  CHECK(r.code == cli::kViolation);
  CHECK(contains(r.err, "violation monitor=phi2"));
  CHECK_FALSE(contains(r.err, "monitor=phi1"));
  // A generous deadline is met even with the buggy threshold.
  auto relaxed = invoke({"run", kExp2, kReq, "--theta", "5000"});
  CHECK(relaxed.code == cli::kOk);
}

TEST_CASE("stop-on-violation ends the run at the violation") {
  auto r = invoke({"run", kExp1, "--stop-on-violation"});
  CHECK(r.code == cli::kViolation);
  CHECK(contains(r.out, "status violation"));
}

TEST_CASE("a recorded trace checks offline to the same verdicts") {
  auto trace = scratch("exp1.trace");
  auto r = invoke({"run", kExp1, "--trace-out", trace.string()});
  REQUIRE(r.code == cli::kViolation);
  REQUIRE(fs::exists(trace));
  auto c = invoke({"check", trace.string(), kReq});
  CHECK(c.code == cli::kViolation);
  CHECK(contains(c.out, "phi1: false (earliest violation at position 125, tick 4)"));
  auto m = invoke({"check", trace.string(), kReq, "--report", "machine"});
  auto j = nlohmann::json::parse(m.out);
  REQUIRE(j.is_array());
  CHECK(j[0]["property"] == "phi1");
  CHECK(j[0]["verdict"] == "false");
  CHECK(j[0]["position"] == 125);
  CHECK(j[1]["verdict"] == "inconclusive");

  auto clean = scratch("nominal.trace");
  REQUIRE(invoke({"run", kDefault, "--trace-out", clean.string()}).code == cli::kOk);
  auto cc = invoke({"check", clean.string(), kReq});
  CHECK(cc.code == cli::kOk);
  CHECK_FALSE(contains(cc.out, "false"));

  auto broken = scratch("broken.trace");
  write(broken, "not a trace\n");
  CHECK(invoke({"check", broken.string(), kReq}).code == cli::kUsage);
}

TEST_CASE("property files with errors are reported with their location") {
  auto bad = scratch("bad.scope");
  write(bad, "property p = always (BatteryReader, BatteryLevel,\n  m[2] >= );\n");
  auto r = invoke({"run", kDefault, bad.string()});
  CHECK(r.code == cli::kUsage);
  CHECK(contains(r.err, "bad.scope"));
  CHECK(contains(r.err, "2"));

  auto unmonitorable = scratch("eventually.scope");
  write(unmonitorable, "property p = eventually (BatteryReader, BatteryLevel, m[2] >= 20);\n");
  CHECK(invoke({"run", kDefault, unmonitorable.string()}).code == cli::kUsage);
  auto s = invoke({"synth", unmonitorable.string()});
  CHECK(s.code == cli::kViolation);
  CHECK(contains(s.err, "p (line 1)"));
}

TEST_CASE("synthesized monitors load back as hand-written monitors") {
  auto dir = scratch("monitors");
  fs::create_directories(dir);
  auto s = invoke({"synth", kReq, "--out-dir", dir.string(), "--dot"});
  REQUIRE(s.code == cli::kOk);
  CHECK(fs::exists(dir / "phi1.pg"));
  CHECK(fs::exists(dir / "phi2.pg"));
  CHECK(fs::exists(dir / "phi2.dot"));

  auto only_phi2 = scratch("phi2.scope");
  write(only_phi2,
        "param theta = 100\n"
        "property phi2 = always ((Navigation, GoToDestination, m[1] = <ok> and m[2] = <running>)\n"
        "    and (BatteryReader, BatteryLevel, m[1] = <ok> and m[2] <= 30)\n"
        "    implies time_until (GoToRechargingStation, Navigation,\n"
        "        m[1] = <start_navigation> and m[2] = <RechargingStation>) < theta);\n");
  auto r = invoke({"run", kExp1, only_phi2.string(), "--monitor", (dir / "phi1.pg").string()});
  CHECK(r.code == cli::kViolation);
  CHECK(contains(r.err, "violation monitor=phi1 tick=4 position=125"));

  auto printed = invoke({"synth", kReq});
  CHECK(printed.code == cli::kOk);
  CHECK(contains(printed.out, "Err"));
}
