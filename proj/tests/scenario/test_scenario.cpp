#include <doctest.h>

#include <queue>

#include "btrv/core/errors.hpp"
#include "btrv/scenario/scenario.hpp"
#include "testkit.hpp"

using namespace btrv;
using namespace btrv::scenario;

namespace {

// Plain BFS over the ASCII map, independent of GridWorld.
int bfs(const std::vector<std::string>& rows, char from, char to) {
  const int h = static_cast<int>(rows.size()), w = static_cast<int>(rows[0].size());
  std::vector<int> dist(static_cast<std::size_t>(w * h), -1);
  std::queue<std::pair<int, int>> q;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (rows[y][x] == from) {
        dist[static_cast<std::size_t>(y * w + x)] = 0;
        q.push({x, y});
      }
  while (!q.empty()) {
    auto [x, y] = q.front();
    q.pop();
    if (rows[y][x] == to) return dist[static_cast<std::size_t>(y * w + x)];
    for (auto [dx, dy] : {std::pair{0, -1}, {1, 0}, {0, 1}, {-1, 0}}) {
      int nx = x + dx, ny = y + dy;
      if (nx < 0 || ny < 0 || nx >= w || ny >= h || rows[ny][nx] == '#') continue;
      auto& d = dist[static_cast<std::size_t>(ny * w + nx)];
      if (d >= 0) continue;
      d = dist[static_cast<std::size_t>(y * w + x)] + 1;
      q.push({nx, ny});
    }
  }
  return -1;
}

std::int64_t level_of(const Message& m) { return std::get<std::int64_t>(*m.at(2)); }

/// Every status the battery condition's skill returns agrees with the level
/// it read just before: success iff level >= threshold.
void check_threshold_replies(const testkit::ScenarioRun& r, std::int64_t threshold) {
  const auto leaf = r.scenario.compiled.node_process.at("BatteryLevelAbove30");
  auto readings = testkit::transmissions_on(r.system, r.trace, {"BatteryReader", "BatteryLevel"});
  auto replies = testkit::transmissions_on(r.system, r.trace, {"BatteryLevel", leaf});
  std::size_t k = 0;
  std::optional<std::int64_t> last;
  int checked = 0;
  for (const auto& [i, reply] : replies) {
    while (k < readings.size() && readings[k].first < i) last = level_of(readings[k++].second);
    REQUIRE(last.has_value());
    const bool ok = *last >= threshold;
    CHECK(reply == bt::status_message(ok ? bt::Status::Success : bt::Status::Failure));
    ++checked;
  }
  CHECK(checked > 0);
}

}  // namespace

TEST_CASE("grid world") {
  auto cfg = default_config();
  auto w = GridWorld::parse(cfg.map);
  CHECK(w.width() == 12);
  CHECK(w.height() == 7);
  CHECK(w.distance(w.start(), w.destination()) == bfs(cfg.map, '@', 'D'));
  CHECK(w.distance(w.start(), w.station()) == bfs(cfg.map, '@', 'R'));
  CHECK(w.distance(w.destination(), w.station()) == bfs(cfg.map, 'D', 'R'));

  // Following next_step walks a shortest path.
  Cell c = w.start();
  int moves = 0;
  while (auto n = w.next_step(c, w.destination())) {
    CHECK(w.distance(*n, w.destination()) == w.distance(c, w.destination()) - 1);
    c = *n;
    ++moves;
  }
  CHECK(c == w.destination());
  CHECK(moves == w.distance(w.start(), w.destination()));
  CHECK(w.render() == cfg.map);

  CHECK_THROWS_AS(GridWorld::parse({"#@D#", "#.#"}), ModelError);
  CHECK_THROWS_AS(GridWorld::parse({"#@DR#x"}), ModelError);
  CHECK_THROWS_AS(GridWorld::parse({"#@D#"}), ModelError);
  CHECK_THROWS_AS(GridWorld::parse({"#@DR@#"}), ModelError);
}

TEST_CASE("scenario construction checks the map") {
  auto cfg = default_config();
  auto s = build_scenario(cfg);
  CHECK_NOTHROW(check_layering(s.system.def(), s.layers));
  CHECK(s.tick_channel == s.compiled.tick_channel);

  auto walled = cfg;
  walled.map = {"#######", "#@.#.D#", "#R.#..#", "#######"};
  CHECK_THROWS_AS(build_scenario(walled), ModelError);

  auto far = cfg;
  far.map = {"#" + std::string("R") + std::string(33, '.') + "D@#"};
  CHECK_THROWS_AS(build_scenario(far), ModelError);
  far.battery.drain_every = 4;  // budget 40 moves
  CHECK_NOTHROW(build_scenario(far));

  auto bad_skill = cfg;
  bad_skill.faults.push_back({Fault::Kind::SkillThresholdBug, 0, 0, "WaitForUser", 20, 0, 0});
  CHECK_THROWS_AS(build_scenario(bad_skill), Error);
}

TEST_CASE("channels only join adjacent layers") {
  SystemDef def = build_scenario(default_config()).system.def();
  auto s = build_scenario(default_config());
  def.channels.push_back({{"TickGenerator", "Navigation"}, 1});
  CHECK_THROWS_AS(check_layering(def, s.layers), ModelError);
}

TEST_CASE("config JSON") {
  auto cfg = default_config();
  cfg.faults.push_back({Fault::Kind::ForceBatteryLevel, 10, 4, "", 0, 0, 0});
  cfg.faults.push_back({Fault::Kind::OverrideNavigation, 0, 0, "", 0, 3, 9});
  auto back = parse_config(to_json(cfg));
  CHECK(back.map == cfg.map);
  CHECK(back.faults.size() == 2);
  CHECK(back.faults[0].at_tick == 4);
  CHECK(back.faults[1].to_tick == 9);
  CHECK(to_json(back) == to_json(cfg));

  auto partial = parse_config(R"({"theta": 7})");
  CHECK(partial.theta == 7);
  CHECK(partial.battery.initial == 33);

  auto message_of = [](const char* text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_of(R"({"theta": "x"})").find("theta") != std::string::npos);
  CHECK(message_of(R"({"faults": [{"kind": "Meteor"}]})").find("Meteor") != std::string::npos);
  CHECK_FALSE(message_of("{").empty());
  CHECK_FALSE(message_of(R"({"battery": {"initial": 101}})").empty());
}

TEST_CASE("nominal mission: dock after the first low reading, recharge, resume, arrive") {
  auto r = testkit::run_scenario(default_config(), default_requirements(100));
  CHECK(r.trace.status == TerminalStatus::Horizon);
  CHECK(r.trace.violations.empty());
  auto ph = testkit::mission_phases(r.system, r.trace);
  REQUIRE(ph.first_low.has_value());
  REQUIRE(ph.first_dock.has_value());
  CHECK(*ph.first_dock > *ph.first_low);
  REQUIRE(ph.recharged.has_value());
  REQUIRE(ph.resumed.has_value());
  auto state = robot_state(r.scenario, r.system, r.trace.final_config);
  CHECK(state.pose == r.scenario.world->destination());
  CHECK_FALSE(state.charging);
  check_threshold_replies(r, 30);
}

TEST_CASE("experiment 1: a forced low reading violates phi1 on that message") {
  auto cfg = default_config();
  cfg.horizon = 2000;
  cfg.faults.push_back({Fault::Kind::ForceBatteryLevel, 10, 4, "", 0, 0, 0});
  auto r = testkit::run_scenario(cfg, default_requirements(cfg.theta));
  auto vs = monitor::verdicts(r.trace, r.monitors);
  REQUIRE(vs.size() == 2);
  CHECK(vs[0].status == monitor::MonitorVerdict::Status::Violated);
  CHECK(vs[0].channel == ChannelKey{"BatteryReader", "BatteryLevel"});
  CHECK(vs[0].message == msg({sym("ok"), std::int64_t{10}}));
  CHECK(vs[0].tick == 4);
  // The violating entry is the first reading of 10.
  const auto& entry = r.trace.tss.entries.at(vs[0].position);
  const int c = r.trace.tss.channel_index({"BatteryReader", "BatteryLevel"});
  CHECK(entry.state[static_cast<std::size_t>(c)] == msg({sym("ok"), std::int64_t{10}}));
  for (std::size_t i = 0; i < vs[0].position; ++i) {
    const auto& m = r.trace.tss.entries[i].state[static_cast<std::size_t>(c)];
    if (m) CHECK(level_of(*m) >= 20);
  }
  CHECK(scope::earliest_violation(*r.formulas[0], r.trace.tss) == vs[0].position);
}

TEST_CASE("experiment 2: the threshold bug violates phi2, the correct skill does not") {
  auto cfg = default_config();
  cfg.horizon = 12000;
  auto clean = testkit::run_scenario(cfg, default_requirements(cfg.theta));
  CHECK(clean.trace.violations.empty());

  cfg.faults.push_back({Fault::Kind::SkillThresholdBug, 0, 0, "BatteryLevelAbove30", 20, 0, 0});
  auto r = testkit::run_scenario(cfg, default_requirements(cfg.theta));
  auto vs = monitor::verdicts(r.trace, r.monitors);
  REQUIRE(vs.size() == 2);
  CHECK(vs[0].status == monitor::MonitorVerdict::Status::Running);
  CHECK(vs[1].status == monitor::MonitorVerdict::Status::Violated);
  CHECK(vs[1].channel == r.scenario.tick_channel);
  CHECK(scope::earliest_violation(*r.formulas[1], r.trace.tss) == vs[1].position);
  check_threshold_replies(r, 20);
}

TEST_CASE("runs are reproducible from the seed") {
  auto cfg = testkit::varied_config(5, 1500);
  auto a = testkit::run_scenario(cfg, default_requirements(cfg.theta));
  auto b = testkit::run_scenario(cfg, default_requirements(cfg.theta));
  CHECK(a.trace.transmissions == b.trace.transmissions);
  CHECK(a.trace.tss == b.trace.tss);
}

TEST_CASE("monitors agree with the offline evaluator on varied scenarios") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    auto cfg = testkit::varied_config(seed, 3000);
    auto r = testkit::run_scenario(cfg, default_requirements(cfg.theta) + testkit::extra_properties());
    INFO("seed ", seed);
    for (const auto& d : testkit::compare_with_oracle(r.trace, r.monitors, r.formulas))
      FAIL_CHECK(d.monitor << ": " << d.detail);
  }
}

TEST_CASE("monitors do not change the monitored run") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto cfg = testkit::varied_config(seed, 2000);
    auto plain = testkit::run_scenario(cfg, "");
    auto inst = testkit::run_scenario(cfg, default_requirements(cfg.theta) + testkit::extra_properties());
    INFO("seed ", seed);
    CHECK(testkit::projected_trace(plain.trace) == testkit::projected_trace(inst.trace));
    CHECK(testkit::project(inst.trace.final_config, plain.system.processes().size(),
                           plain.trace.final_config.vars.size()) == plain.trace.final_config);
  }
}
