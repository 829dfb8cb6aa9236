// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "btrv/cli/commands.hpp"
#include "btrv/core/errors.hpp"
#include "btrv/scope/parser.hpp"
#include "testkit.hpp"

using namespace btrv;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kSrc = BTRV_SOURCE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
  int failures = 0;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (++failures <= 5) detail += (detail.empty() ? "" : "; ") + why;
    if (failures == 6) detail += "; ...";
  }
  void note(const std::string& what) {
    if (pass) detail += (detail.empty() ? "" : ", ") + what;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

struct CliRun {
  int code = 0;
  double seconds = 0;
  std::string err;
};

CliRun cli_run(const std::string& config, std::optional<std::string> properties = std::nullopt) {
  cli::RunRequest req;
  req.config_path = config;
  req.properties_path = std::move(properties);
  std::ostringstream out, err;
  auto t0 = Clock::now();
  int code = cli::cmd_run(req, "text", out, err);
  return {code, seconds_since(t0), err.str()};
}

/// Replays a run step by step (with the run's tick hook) and returns, per
/// step, the location name of process `p`.
std::vector<std::string> location_history(const ChannelSystem& cs, const RunOptions& opts, const ExecutionTrace& t,
                                          int p, std::vector<StepEffect>* effects = nullptr) {
  std::vector<std::string> out;
  Configuration cfg = start_configuration(cs);
  const auto& locs = cs.processes()[static_cast<std::size_t>(p)].locations;
  const int tick_channel = opts.tick_channel ? cs.channel_index(*opts.tick_channel) : -1;
  std::uint64_t ticks = 0;
  out.push_back(locs[static_cast<std::size_t>(cfg.locations[static_cast<std::size_t>(p)])]);
  for (const auto& choice : t.choices) {
    auto eff = apply_step(cs, cfg, choice);
    if (eff.transmission && eff.channel == tick_channel && opts.on_tick) opts.on_tick(ticks++, cfg);
    if (effects) effects->push_back(eff);
    out.push_back(locs[static_cast<std::size_t>(cfg.locations[static_cast<std::size_t>(p)])]);
  }
  return out;
}

std::vector<std::string> location_history(const testkit::ScenarioRun& r, const std::string& process,
                                          std::vector<StepEffect>* effects = nullptr) {
  return location_history(r.system, r.scenario.run_options(r.system), r.trace, r.system.process_index(process),
                          effects);
}

// 1 ---------------------------------------------------------------------------
Outcome experiment1() {
  Outcome o;
  const std::string path = kSrc + "/configs/experiment1.json";
  auto c = cli_run(path);
  if (c.code != cli::kViolation) o.fail("exit code " + std::to_string(c.code) + ", expected 1");
  if (c.seconds >= 5.0) o.fail("runtime " + fmt_seconds(c.seconds));
  auto cfg = scenario::load_config(path);
  if (cfg.horizon != 2000) o.fail("config horizon is not 2000");

  auto r = testkit::run_scenario(cfg, scenario::default_requirements(cfg.theta));
  std::vector<StepEffect> effects;
  auto hist = location_history(r, "phi1", &effects);
  const int bat = r.system.channel_index({"BatteryReader", "BatteryLevel"});
  const Message ten = msg({sym("ok"), std::int64_t{10}});
  std::optional<std::size_t> err_step, first_ten;
  for (std::size_t i = 0; i < effects.size(); ++i) {
    if (!first_ten && effects[i].transmission && effects[i].channel == bat && effects[i].message == ten) first_ten = i;
    if (!err_step && hist[i + 1] == "Err") err_step = i;
  }
  if (!first_ten) o.fail("no [<ok>,10] reading was transmitted");
  if (!err_step) o.fail("phi1 never reached Err");
  if (first_ten && err_step && *first_ten != *err_step)
    o.fail("Err at step " + std::to_string(*err_step) + ", reading at step " + std::to_string(*first_ten));
  for (std::size_t i = 0; err_step && i <= *err_step; ++i)
    if (hist[i] != "I") o.fail("phi1 left I before the violation");
  // Between steps the safety monitor settles back to I or Err; the Obs
  // visit happens inside the observing step.
  if (o.pass)
    o.note("phi1 I->Err at step " + std::to_string(*err_step) + " on [<ok>,10], exit 1, " + fmt_seconds(c.seconds));
  return o;
}

// 2 ---------------------------------------------------------------------------
Outcome experiment2() {
  Outcome o;
  const std::string path = kSrc + "/configs/experiment2.json";
  auto c = cli_run(path);
  if (c.code != cli::kViolation) o.fail("exit code " + std::to_string(c.code) + ", expected 1");
  if (c.err.find("monitor=phi2") == std::string::npos) o.fail("phi2 not reported");
  if (c.seconds >= 5.0) o.fail("runtime " + fmt_seconds(c.seconds));

  auto cfg = scenario::load_config(path);
  if (cfg.theta != 100) o.fail("theta is not 100");
  auto bad = testkit::run_scenario(cfg, scenario::default_requirements(cfg.theta));
  auto hist_bad = location_history(bad, "phi2");
  if (hist_bad.back() != "Err") o.fail("phi2 did not reach Err with the threshold bug");

  auto clean_cfg = cfg;
  clean_cfg.faults.clear();
  auto t0 = Clock::now();
  auto clean = testkit::run_scenario(clean_cfg, scenario::default_requirements(cfg.theta));
  const double clean_s = seconds_since(t0);
  auto hist = location_history(clean, "phi2");
  const std::set<std::string> allowed{"I", "I1", "C1", "S", "C2"};
  std::set<std::string> visited;
  for (const auto& l : hist) {
    visited.insert(l);
    if (!allowed.count(l)) {
      o.fail("unfaulted run: phi2 visited " + l);
      break;
    }
  }
  if (!visited.count("C2")) o.fail("unfaulted run never armed the phi2 timer");
  if (clean_s >= 5.0) o.fail("unfaulted runtime " + fmt_seconds(clean_s));
  if (o.pass)
    o.note("phi2 Err at tick " + std::to_string(bad.trace.violations.at(0).tick) + ", unfaulted seed " +
           std::to_string(cfg.seed) + " stays in {I,I1,C1,S,C2} over " + std::to_string(hist.size() - 1) +
           " steps, " + fmt_seconds(c.seconds));
  return o;
}

// 3 ---------------------------------------------------------------------------
Outcome nominal() {
  Outcome o;
  auto cfg = scenario::load_config(kSrc + "/configs/default.json");
  if (cfg.horizon != 5000) o.fail("config horizon is not 5000");
  if (!cfg.faults.empty()) o.fail("default config has faults");
  auto r = testkit::run_scenario(cfg, scenario::default_requirements(cfg.theta));
  if (!r.trace.violations.empty()) o.fail(std::to_string(r.trace.violations.size()) + " violations");
  auto ph = testkit::mission_phases(r.system, r.trace);
  if (!ph.first_low) o.fail("level never dropped below 30");
  if (!ph.first_dock) o.fail("no [<start_navigation>,<RechargingStation>] on GoToRechargingStation->Navigation");
  if (ph.first_low && ph.first_dock && *ph.first_dock < *ph.first_low) o.fail("docking command precedes the low reading");
  if (!ph.recharged) o.fail("battery never recharged to 100");
  if (!ph.resumed) o.fail("navigation to the destination never resumed");
  auto state = scenario::robot_state(r.scenario, r.system, r.trace.final_config);
  if (!(state.pose == r.scenario.world->destination())) o.fail("robot did not arrive");
  if (o.pass) {
    auto tick = [&](std::size_t i) { return std::to_string(r.trace.transmissions[i].tick); };
    o.note("low reading at tick " + tick(*ph.first_low) + ", dock command tick " + tick(*ph.first_dock) +
           ", recharged tick " + tick(*ph.recharged) + ", resumed tick " + tick(*ph.resumed) +
           ", arrived, 0 violations");
  }
  return o;
}

// 4 ---------------------------------------------------------------------------
Outcome oracle_equivalence() {
  Outcome o;
  std::size_t seeds = 0, positions = 0, violations = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto cfg = testkit::varied_config(seed, 3000);
    auto r = testkit::run_scenario(cfg, scenario::default_requirements(cfg.theta) + testkit::extra_properties());
    auto bad = testkit::compare_with_oracle(r.trace, r.monitors, r.formulas);
    for (const auto& d : bad) o.fail("seed " + std::to_string(seed) + " " + d.monitor + ": " + d.detail);
    ++seeds;
    positions += r.trace.tss.size();
    violations += r.trace.violations.size();
  }
  o.note(std::to_string(seeds) + " scenario seeds (" + std::to_string(positions) + " positions, " +
         std::to_string(violations) + " violations)");

  // Exhaustive micro systems: every schedule of at most 6 steps, so every
  // prefix of every trace is checked.
  const auto props = testkit::micro_properties();
  std::size_t schedules = 0;
  std::map<std::string, std::size_t> violated;
  for (int capacity : {0, 1}) {
    ChannelSystem cs(testkit::micro_system(capacity));
    std::vector<monitor::MonitorGraph> monitors;
    std::vector<scope::FormulaPtr> formulas;
    monitor::CompileOptions opts;
    opts.tick_channel = testkit::micro_tick_channel();
    for (const auto& p : scope::parse_property_file(props).properties) {
      monitors.push_back(monitor::synthesize(monitor::compile_from_scope(p.name, *p.formula, opts)));
      formulas.push_back(p.formula);
    }
    ChannelSystem inst = monitor::attach(cs, monitors);
    testkit::enumerate_schedules(cs, 6, [&](const std::vector<TransitionInstance>& path) {
      ++schedules;
      ScriptedScheduler sched(path);
      RunOptions ro;
      ro.horizon = path.size();
      ro.tick_channel = testkit::micro_tick_channel();
      auto trace = run(inst, sched, ro);
      for (const auto& d : testkit::compare_with_oracle(trace, monitors, formulas))
        o.fail("micro capacity " + std::to_string(capacity) + " " + d.monitor + ": " + d.detail);
      for (const auto& v : monitor::verdicts(trace, monitors))
        if (v.status == monitor::MonitorVerdict::Status::Violated) ++violated[v.monitor];
    });
  }
  std::size_t never = 0;
  for (const auto& p : scope::parse_property_file(props).properties)
    if (!violated[p.name]) ++never;
  if (never) o.fail(std::to_string(never) + " micro properties never violated");
  o.note(std::to_string(schedules) + " micro schedules x " + std::to_string(violated.size()) + " properties");
  return o;
}

// 5 ---------------------------------------------------------------------------
Outcome non_interference() {
  Outcome o;
  std::size_t seeds = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto cfg = testkit::varied_config(seed, 3000);
    auto plain = testkit::run_scenario(cfg, "");
    auto inst = testkit::run_scenario(cfg, scenario::default_requirements(cfg.theta) + testkit::extra_properties());
    if (testkit::projected_trace(plain.trace) != testkit::projected_trace(inst.trace))
      o.fail("seed " + std::to_string(seed) + ": projected traces differ");
    if (testkit::project(inst.trace.final_config, plain.system.processes().size(),
                         plain.trace.final_config.vars.size()) != plain.trace.final_config)
      o.fail("seed " + std::to_string(seed) + ": final configurations differ");
    if (plain.trace.transmissions != inst.trace.transmissions)
      o.fail("seed " + std::to_string(seed) + ": transmissions differ");
    ++seeds;
  }
  // Random systems with genuine races.
  testkit::Rng rng(5150);
  std::size_t systems = 0;
  while (systems < 100) {
    SystemDef def = testkit::random_system(rng);
    if (def.channels.size() < 2) continue;
    ++systems;
    const ChannelKey tick = def.channels[0].key, data = def.channels[1].key;
    const std::string ch = "(" + data.source + ", " + data.dest + ", ";
    auto props = scope::parse_property_file("property s = always not " + ch + "m[1] = <b>);\nproperty r = always (" +
                                            ch + "m[1] = <a>) implies time_until " + ch + "m[1] = <b>) < 2);\n");
    std::vector<monitor::MonitorGraph> monitors;
    monitor::CompileOptions opts;
    opts.tick_channel = tick;
    for (const auto& p : props.properties)
      monitors.push_back(monitor::synthesize(monitor::compile_from_scope(p.name, *p.formula, opts)));
    ChannelSystem cs(def);
    ChannelSystem inst = monitor::attach(cs, monitors);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      RunOptions ro;
      ro.horizon = 80;
      ro.tick_channel = tick;
      RandomScheduler a(seed), b(seed);
      auto ta = run(cs, a, ro);
      auto tb = run(inst, b, ro);
      if (testkit::projected_trace(ta) != testkit::projected_trace(tb) || ta.choices != tb.choices ||
          testkit::project(tb.final_config, cs.processes().size(), ta.final_config.vars.size()) != ta.final_config)
        o.fail("random system " + std::to_string(systems) + " seed " + std::to_string(seed) + " differs");
    }
  }
  o.note(std::to_string(seeds) + " scenario seeds and " + std::to_string(systems) +
         " random systems byte-identical after projection");
  return o;
}

// 6 ---------------------------------------------------------------------------
Outcome bt_determinism() {
  Outcome o;
  const auto tree = scenario::fig1_tree();
  const auto ct = bt::compile_bt(tree);
  testkit::Rng rng(6);
  const std::uint64_t ticks = 15;
  std::size_t scripts_run = 0;
  auto statuses = [&](const testkit::SkillScripts& scripts, Scheduler& sched) {
    ChannelSystem cs(testkit::scripted_tree_system(tree, scripts));
    RunOptions ro;
    ro.horizon = 1'000'000;
    ro.tick_channel = ct.tick_channel;
    ro.tick_horizon = ticks + 1;
    auto t = run(cs, sched, ro);
    return testkit::root_statuses(cs, t, ct.status_channel);
  };
  for (int i = 0; i < 150; ++i) {
    std::vector<const bt::NodeDef*> leaves;
    testkit::collect_leaves(tree.root, leaves);
    testkit::SkillScripts scripts;
    for (const auto* l : leaves) scripts[l->skill->skill] = testkit::random_reply_script(rng, ticks, i % 4 == 0);
    RandomScheduler a(static_cast<std::uint64_t>(i) * 2 + 1), b(static_cast<std::uint64_t>(i) * 2 + 2);
    RoundRobinScheduler c;
    auto sa = statuses(scripts, a), sb = statuses(scripts, b), sc = statuses(scripts, c);
    testkit::ReferenceTree ref(tree, scripts);
    std::vector<Message> expected;
    for (std::uint64_t k = 0; k < ticks; ++k) expected.push_back(bt::status_message(ref.tick()));
    if (sa != sb || sa != sc) o.fail("script " + std::to_string(i) + ": schedulers disagree");
    if (sa != expected) o.fail("script " + std::to_string(i) + ": differs from the reference interpreter");
    ++scripts_run;
  }
  o.note(std::to_string(scripts_run) + " scripts x " + std::to_string(ticks) +
         " ticks, three schedulers, identical root statuses matching the reference interpreter");
  return o;
}

// 7 ---------------------------------------------------------------------------
Outcome channel_semantics() {
  Outcome o;
  testkit::Rng rng(7);
  std::size_t configs = 0, steps = 0;
  for (int sys = 0; sys < 1000; ++sys) {
    SystemDef def = testkit::random_system(rng);
    ChannelSystem cs(def);
    for (int k = 0; k < 10; ++k) {
      Configuration cfg = testkit::random_configuration(rng, cs);
      auto en = enabled_transitions(cs, cfg);
      std::set<TransitionInstance> got(en.begin(), en.end());
      if (got != testkit::oracle_enabled(def, cs, cfg) || got.size() != en.size()) {
        o.fail("system " + std::to_string(sys) + ": enabled set differs from the oracle");
        break;
      }
      ++configs;
    }
    // Walk a random run, checking the oracle and capacities at each step.
    Configuration cfg = start_configuration(cs);
    for (int s = 0; s < 30; ++s) {
      auto en = enabled_transitions(cs, cfg);
      if (std::set<TransitionInstance>(en.begin(), en.end()) != testkit::oracle_enabled(def, cs, cfg)) {
        o.fail("system " + std::to_string(sys) + ": oracle mismatch along a run");
        break;
      }
      if (en.empty()) break;
      apply_step(cs, cfg, testkit::pick(rng, en));
      try {
        check_capacity_invariant(cs, cfg);
      } catch (const ModelError& e) {
        o.fail(e.what());
      }
      for (std::size_t c = 0; c < cs.channels().size(); ++c)
        if (cs.channels()[c].capacity == 0 && cfg.buffers[c]) o.fail("capacity-0 buffer holds a message");
      ++steps;
    }
  }
  o.note("1000 systems, " + std::to_string(configs) + " random configurations, " + std::to_string(steps) +
         " checked steps");
  return o;
}

// 8 ---------------------------------------------------------------------------
Outcome parser_round_trip() {
  Outcome o;
  testkit::Rng rng(8);
  std::vector<ChannelKey> chans{{"BatteryReader", "BatteryLevel"}, {"Navigation", "GoToDestination"},
                                {"GoToRechargingStation", "Navigation"}};
  std::size_t max_depth = 0;
  for (int i = 0; i < 1000; ++i) {
    auto f = testkit::random_formula(rng, 6, chans);
    max_depth = std::max(max_depth, scope::depth(*f));
    if (scope::depth(*f) > 6) o.fail("generator exceeded depth 6");
    const auto text = scope::to_string(*f);
    try {
      if (!scope::equal(*scope::parse(text), *f)) o.fail("round trip changed: " + text);
    } catch (const Error& e) {
      o.fail("reparse failed: " + text + ": " + e.what());
    }
  }
  using namespace scope;
  const ChannelKey bat{"BatteryReader", "BatteryLevel"}, nav{"Navigation", "GoToDestination"},
      dock{"GoToRechargingStation", "Navigation"};
  auto phi1 = f_always(f_event(bat, cimplies(cmp(1, RelOp::Eq, sym("ok")), cmp(2, RelOp::Ge, std::int64_t{20}))));
  auto phi2 = f_always(f_implies(
      f_and(f_event(nav, cand(cmp(1, RelOp::Eq, sym("ok")), cmp(2, RelOp::Eq, sym("running")))),
            f_event(bat, cand(cmp(1, RelOp::Eq, sym("ok")), cmp(2, RelOp::Le, std::int64_t{30})))),
      f_time_until(dock, cand(cmp(1, RelOp::Eq, sym("start_navigation")), cmp(2, RelOp::Eq, sym("RechargingStation"))),
                   RelOp::Lt, 100)));
  auto props = load_property_file(kSrc + "/configs/requirements.scope");
  if (props.properties.size() != 2 || !equal(*props.properties[0].formula, *phi1))
    o.fail("phi1 does not parse to the documented AST");
  if (props.properties.size() != 2 || !equal(*props.properties[1].formula, *phi2))
    o.fail("phi2 does not parse to the documented AST");
  o.note("1000 ASTs (max depth " + std::to_string(max_depth) + ") round-trip, phi1 and phi2 match");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*check)();
  };
  const Criterion criteria[] = {
      {"experiment-1", experiment1},        {"experiment-2", experiment2},
      {"nominal-mission", nominal},         {"oracle-equivalence", oracle_equivalence},
      {"non-interference", non_interference}, {"bt-determinism", bt_determinism},
      {"channel-semantics", channel_semantics}, {"parser-round-trip", parser_round_trip},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    auto t0 = Clock::now();
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << index << " " << c.name << ": " << o.detail << " ["
              << fmt_seconds(seconds_since(t0)) << "]" << std::endl;
  }
  return failed ? 1 : 0;
}
