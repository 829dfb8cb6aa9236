#include <doctest.h>

#include "btrv/core/errors.hpp"
#include "btrv/monitor/monitor.hpp"
#include "btrv/scope/parser.hpp"
#include "btrv/scope/property_file.hpp"
#include "testkit.hpp"

using namespace btrv;
using namespace btrv::monitor;
using btrv::testkit::Rng;

namespace {

struct Compiled {
  std::vector<MonitorGraph> monitors;
  std::vector<scope::FormulaPtr> formulas;
};

Compiled compile_all(const std::string& text, std::optional<ChannelKey> tick) {
  Compiled out;
  CompileOptions opts;
  opts.tick_channel = std::move(tick);
  for (const auto& p : scope::parse_property_file(text).properties) {
    out.monitors.push_back(synthesize(compile_from_scope(p.name, *p.formula, opts)));
    out.formulas.push_back(p.formula);
  }
  return out;
}

std::set<std::string> location_names(const ProcessDef& p) {
  std::set<std::string> out;
  for (const auto& l : p.graph.locations()) out.insert(l);
  return out;
}

const ChannelKey kTick{"TickGenerator", "BT_Root"};

}  // namespace

TEST_CASE("safety shape") {
  auto phi = scope::parse("always (BatteryReader, BatteryLevel, m[1] = <ok> implies m[2] >= 20)");
  auto spec = compile_from_scope("phi1", *phi);
  CHECK(spec.pattern == MonitorSpec::Pattern::Safety);
  CHECK(spec.safety.channel == ChannelKey{"BatteryReader", "BatteryLevel"});
  CHECK(scope::condition_holds(*spec.safety.safe, msg({sym("ok"), std::int64_t{20}})));
  CHECK_FALSE(scope::condition_holds(*spec.safety.safe, msg({sym("ok"), std::int64_t{19}})));
  auto g = synthesize(spec);
  CHECK(location_names(g.process) == std::set<std::string>{"I", "Obs", "Err"});
  CHECK(g.process.observer);
  CHECK(g.process.error_location == "Err");
  CHECK_NOTHROW(check_internal_acyclic(g.process));

  // Boolean combinations of events on one channel fold into one condition.
  auto folded = compile_from_scope("f", *scope::parse("always ((A, B, m[1] = 1) implies not (A, B, m[2] = 2))"));
  CHECK(folded.safety.channel == ChannelKey{"A", "B"});
}

TEST_CASE("response shape") {
  auto phi = scope::parse(
      "always ((Navigation, GoToDestination, m[1] = <ok> and m[2] = <running>) and"
      " (BatteryReader, BatteryLevel, m[1] = <ok> and m[2] <= 30) implies"
      " time_until (GoToRechargingStation, Navigation, m[1] = <start_navigation>) < 100)");
  auto spec = compile_from_scope("phi2", *phi, {kTick});
  CHECK(spec.pattern == MonitorSpec::Pattern::Response);
  CHECK(spec.response.theta == 100);
  REQUIRE(spec.response.trigger.size() == 2);
  CHECK(spec.response.trigger[0].channel == ChannelKey{"Navigation", "GoToDestination"});
  CHECK(spec.response.trigger[1].channel == ChannelKey{"BatteryReader", "BatteryLevel"});
  CHECK(spec.response.tick_channel == kTick);
  auto g = synthesize(spec);
  CHECK(location_names(g.process) == std::set<std::string>{"I", "I1", "C1", "S", "C2", "Err"});
  CHECK_NOTHROW(check_internal_acyclic(g.process));

  auto le = compile_from_scope("le", *scope::parse("always ((A, B, m[1] = 1) implies time_until (A, B, m[1] = 2) <= 3)"),
                               {kTick});
  CHECK(le.response.theta == 4);

  // Two conjuncts on one channel become one latch condition.
  auto same = compile_from_scope(
      "s", *scope::parse("always ((A, B, m[1] = 1) and (A, B, m[2] = 2) implies time_until (B, A, m[1] = 3) < 2)"),
      {kTick});
  CHECK(same.response.trigger.size() == 1);
}

TEST_CASE("formulas outside the monitorable fragment are rejected") {
  auto reject = [](const char* text, std::optional<ChannelKey> tick = kTick) {
    CompileOptions opts;
    opts.tick_channel = tick;
    CHECK_THROWS_AS(compile_from_scope("x", *scope::parse(text), opts), NotMonitorable);
  };
  reject("eventually (A, B, m[1] = 1)");
  reject("(A, B, m[1] = 1)");
  reject("always (A, B, m[1] = 1)");  // false on an empty channel
  reject("always ((A, B, m[1] = 1) implies (B, A, m[1] = 1))");
  reject("always next (A, B, m[1] = 1)");
  reject("always ((A, B, m[1] = 1) implies time_until (A, B, m[1] = 2) > 3)");
  reject("always ((A, B, m[1] = 1) implies time_until (A, B, m[1] = 2) < 0)");
  reject("always ((A, B, m[1] = 1) implies time_until (A, B, m[1] = 2) < 3)", std::nullopt);
  reject("always ((A, B, m[1] = 1) implies time_until (TickGenerator, BT_Root, m[1] = <tick>) < 3)");
  reject("always ((TickGenerator, BT_Root, m[1] = <tick>) implies time_until (A, B, m[1] = 2) < 3)");
  reject("always (not (A, B, m[1] = 1) implies time_until (A, B, m[1] = 2) < 3)");
  reject("always ((A, B, m[1] = 1) implies time_until (A, B, not m[1] = 2) < 3)");
  reject("always ((A, B, m[1] = 1) or (A, B, m[1] = 3) implies time_until (A, B, m[1] = 2) < 3)");
}

TEST_CASE("attach checks names and channels") {
  ChannelSystem cs(testkit::micro_system(1));
  auto ok = compile_all("property m = always not (P, Q, m[1] = <c>);", std::nullopt);
  ChannelSystem inst = attach(cs, ok.monitors);
  CHECK(inst.processes().size() == cs.processes().size() + 1);

  auto clash = compile_all("property P = always not (P, Q, m[1] = <c>);", std::nullopt);
  CHECK_THROWS_AS(attach(cs, clash.monitors), AttachError);
  auto missing = compile_all("property m = always not (P, R, m[1] = <c>);", std::nullopt);
  CHECK_THROWS_AS(attach(cs, missing.monitors), AttachError);

  ProcessDef plain = testkit::micro_system(1).processes[0];
  CHECK_THROWS_AS(from_process(plain), ModelError);
}

TEST_CASE("internal cycles in hand-written monitors are rejected") {
  ProcessDef p;
  p.name = "loop";
  p.observer = true;
  p.error_location = "Err";
  for (const char* l : {"A", "B", "Err"}) p.graph.add_location(l);
  p.graph.add_initial("A");
  p.graph.internal("A", nullptr, {}, "B");
  p.graph.internal("B", nullptr, {}, "A");
  CHECK_THROWS_AS(check_internal_acyclic(p), ModelError);
}

TEST_CASE("dot rendering names every location") {
  auto c = compile_all("property r = always ((P, Q, m[1] = <a>) implies time_until (P, Q, m[1] = <b>) < 2);",
                       ChannelKey{"Q", "P"});
  auto dot = to_dot(c.monitors[0].process);
  CHECK(dot.rfind("digraph", 0) == 0);
  for (const char* l : {"I", "I1", "C1", "S", "C2", "Err"}) CHECK(dot.find(std::string("\"") + l + "\"") != std::string::npos);
}

TEST_CASE("safety monitor flags the offending message at its position") {
  ChannelSystem cs(testkit::micro_system(1));
  auto c = compile_all("property no_c = always not (P, Q, m[1] = <c>);", testkit::micro_tick_channel());
  ChannelSystem inst = attach(cs, c.monitors);
  CHECK(enabled_transitions(inst, start_configuration(inst)).size() == 6);  // three sends each, nothing to receive
  // P sends <a>, Q receives it, P sends <c>. Transitions per process: send a, b, c, receive.
  ScriptedScheduler sched({{0, 0, -1, -1}, {1, 3, -1, -1}, {0, 2, -1, -1}});
  RunOptions opts;
  opts.horizon = 3;
  opts.tick_channel = testkit::micro_tick_channel();
  auto trace = run(inst, sched, opts);
  REQUIRE(trace.violations.size() == 1);
  CHECK(trace.violations[0].monitor == "no_c");
  CHECK(trace.violations[0].position == 1);
  CHECK(trace.violations[0].tick == 0);
  CHECK(trace.violations[0].message == msg({sym("c")}));
  CHECK(scope::earliest_violation(*c.formulas[0], trace.tss) == 1u);
}

TEST_CASE("monitors agree with the offline evaluator on random racing systems") {
  Rng rng(2024);
  int systems = 0;
  while (systems < 60) {
    SystemDef def = testkit::random_system(rng);
    std::vector<ChannelKey> keys;
    for (const auto& ch : def.channels) keys.push_back(ch.key);
    if (keys.size() < 3) continue;
    ++systems;
    auto name = [](const ChannelKey& k) { return "(" + k.source + ", " + k.dest + ", "; };
    const ChannelKey tick = keys[0];
    const std::string theta = std::to_string(testkit::uniform(rng, 1, 4));
    std::string text = "property s1 = always not " + name(keys[1]) + "m[1] = <b>);\n" +
                       "property s2 = always (" + name(keys[2]) + "m[1] = <a>) implies " + name(keys[2]) +
                       "m[2] < 2));\n" + "property r1 = always (" + name(keys[1]) + "m[1] = <a>) implies time_until " +
                       name(keys[2]) + "m[1] = <b>) < " + theta + ");\n" + "property r2 = always (" + name(keys[2]) +
                       "m[1] = <a>) and " + name(keys[1]) + "m[1] = <a>) implies time_until " + name(keys[1]) +
                       "m[1] = <b>) <= " + theta + ");\n";
    auto c = compile_all(text, tick);
    ChannelSystem cs(def);
    ChannelSystem inst = attach(cs, c.monitors);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      RandomScheduler sched(seed);
      RunOptions opts;
      opts.horizon = 60;
      opts.tick_channel = tick;
      auto trace = run(inst, sched, opts);
      for (const auto& d : testkit::compare_with_oracle(trace, c.monitors, c.formulas))
        FAIL_CHECK(d.monitor << ": " << d.detail << "\n" << text);
    }
  }
}

TEST_CASE("monitors agree with the offline evaluator on every schedule of the micro systems") {
  const auto props = testkit::micro_properties();
  std::map<std::string, std::size_t> violated;
  // Capacity 1 needs a receive between two ticks, hence the deeper bound.
  for (auto [capacity, depth] : {std::pair<int, std::size_t>{0, 6}, {1, 8}}) {
    ChannelSystem cs(testkit::micro_system(capacity));
    auto c = compile_all(props, testkit::micro_tick_channel());
    ChannelSystem inst = attach(cs, c.monitors);
    std::size_t schedules = 0;
    std::vector<testkit::Disagreement> bad;
    testkit::enumerate_schedules(cs, depth, [&](const std::vector<TransitionInstance>& path) {
      ++schedules;
      ScriptedScheduler sched(path);
      RunOptions opts;
      opts.horizon = path.size();
      opts.tick_channel = testkit::micro_tick_channel();
      auto trace = run(inst, sched, opts);
      for (auto& d : testkit::compare_with_oracle(trace, c.monitors, c.formulas)) bad.push_back(d);
      for (const auto& v : verdicts(trace, c.monitors))
        if (v.status == MonitorVerdict::Status::Violated) ++violated[v.monitor];
    });
    INFO("capacity ", capacity, ", schedules ", schedules);
    CHECK(schedules > 50000);
    CHECK(bad.empty());
    for (std::size_t i = 0; i < bad.size() && i < 10; ++i) FAIL_CHECK(bad[i].monitor << ": " << bad[i].detail);
  }
  // Every property is violated on some schedule, so agreement is not vacuous.
  for (const auto& p : scope::parse_property_file(props).properties) {
    INFO(p.name);
    CHECK(violated[p.name] > 0);
  }
}
