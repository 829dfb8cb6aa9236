#include "btrv/scenario/scenario.hpp"

#include <set>

#include "btrv/core/errors.hpp"
#include "btrv/scope/property_file.hpp"

namespace btrv::scenario {

namespace {

bt::SkillBinding skill(const std::string& name) {
  bt::SkillBinding b;
  b.skill = name;
  return b;
}

bt::SkillBinding haltable(const std::string& name) {
  bt::SkillBinding b = skill(name);
  b.halt_request = bt::halt_message();
  return b;
}

// The 10% reserve: the station must be reachable from every reachable cell
// while draining at most 10 points.
void check_world(const GridWorld& w, const BatteryConfig& battery) {
  auto to_dest = w.distances_to(w.destination());
  auto to_station = w.distances_to(w.station());
  if (to_dest[static_cast<std::size_t>(w.index(w.start()))] < 0)
    throw ModelError("destination is unreachable from the robot start");
  if (to_station[static_cast<std::size_t>(w.index(w.start()))] < 0)
    throw ModelError("recharging station is unreachable from the robot start");
  const std::int64_t budget = 10 * battery.drain_every;
  auto from_start = w.distances_to(w.start());
  for (int i = 0; i < w.cells(); ++i) {
    if (from_start[static_cast<std::size_t>(i)] < 0) continue;
    if (to_station[static_cast<std::size_t>(i)] > budget) {
      Cell c = w.cell(i);
      throw ModelError("cell (" + std::to_string(c.x) + "," + std::to_string(c.y) + ") is " +
                       std::to_string(to_station[static_cast<std::size_t>(i)]) +
                       " moves from the station, more than 10% of the battery (" + std::to_string(budget) +
                       " moves)");
    }
  }
}

}  // namespace

bt::BehaviorTreeDef fig1_tree() {
  using namespace bt;
  BehaviorTreeDef def;
  def.name = "ServiceRobot";
  def.tick_source = kTickGenerator;
  def.root = fallback("Root", {
      sequence("Mission", {
          condition("BatteryLevelAbove30", skill("BatteryLevel")),
          condition("BatteryNotRecharging", skill("BatteryNotRecharging")),
          fallback("Navigate", {
              condition("AtDestination", skill("AtDestination")),
              action("GoToDestination", haltable("GoToDestination")),
          }),
          condition("WaitForUser", skill("WaitForUser")),
      }),
      fallback("Dock", {
          condition("AtRechargingStation", skill("AtRechargingStation")),
          action("GoToRechargingStation", haltable("GoToRechargingStation")),
      }),
  });
  return def;
}

const std::map<std::string, std::string>& fig1_skills() {
  static const std::map<std::string, std::string> skills = {
      {"BatteryLevelAbove30", "BatteryLevel"},
      {"BatteryNotRecharging", "BatteryNotRecharging"},
      {"AtDestination", "AtDestination"},
      {"GoToDestination", "GoToDestination"},
      {"WaitForUser", "WaitForUser"},
      {"AtRechargingStation", "AtRechargingStation"},
      {"GoToRechargingStation", "GoToRechargingStation"},
  };
  return skills;
}

void check_layering(const SystemDef& def, const std::map<std::string, Layer>& layers) {
  auto layer_of = [&](const std::string& p) {
    auto it = layers.find(p);
    if (it == layers.end()) throw ModelError("process '" + p + "' has no layer");
    return static_cast<int>(it->second);
  };
  for (const auto& ch : def.channels) {
    const int a = layer_of(ch.key.source);
    const int b = layer_of(ch.key.dest);
    const bool adjacent = a - b == 1 || b - a == 1;
    const bool same_ok = a == b && (a == static_cast<int>(Layer::Tree) || a == static_cast<int>(Layer::Component));
    if (!adjacent && !same_ok)
      throw ModelError("channel " + to_string(ch.key) + " skips a layer");
  }
}

Scenario build_scenario(const ScenarioConfig& config) {
  auto world = std::make_shared<const GridWorld>(GridWorld::parse(config.map));
  check_world(*world, config.battery);

  std::int64_t threshold = config.threshold;
  for (const auto& f : config.faults) {
    if (f.kind != Fault::Kind::SkillThresholdBug) continue;
    if (f.skill != "BatteryLevelAbove30" && f.skill != "BatteryLevel")
      throw Error("SkillThresholdBug: skill '" + f.skill + "' has no threshold");
    threshold = f.threshold;
  }

  bt::BehaviorTreeDef tree = fig1_tree();
  bt::CompiledTree compiled = bt::compile_bt(tree);
  auto leaf = [&](const std::string& name) { return compiled.node_process.at(name); };
  const auto& skills = fig1_skills();
  auto skill_of = [&](const std::string& leaf_name) { return skills.at(leaf_name); };

  SystemDef def;
  def.name = "service_robot";
  def.shared.push_back({kLevelVar, Domain::integer(0, 100), Value{config.battery.initial}});
  def.shared.push_back({kPoseVar, Domain::integer(0, world->cells() - 1),
                        Value{std::int64_t{world->index(world->start())}}});
  def.shared.push_back({kHeadingVar, Domain::integer(0, 3), Value{std::int64_t{0}}});

  std::map<std::string, Layer> layers;
  def.processes.push_back(tick_generator(compiled.root_process));
  layers[kTickGenerator] = Layer::TickSource;
  for (const auto& p : compiled.processes) {
    def.processes.push_back(p);
    layers[p.name] = Layer::Tree;
  }
  def.channels = compiled.channels;

  auto add_skill = [&](ProcessDef p, const std::string& component) {
    layers[p.name] = Layer::Skill;
    def.channels.push_back({{p.name, component}, 1});
    def.channels.push_back({{component, p.name}, 1});
    def.processes.push_back(std::move(p));
  };
  add_skill(battery_level_skill(skill_of("BatteryLevelAbove30"), leaf("BatteryLevelAbove30"), threshold),
            kBatteryReader);
  add_skill(battery_not_recharging_skill(skill_of("BatteryNotRecharging"), leaf("BatteryNotRecharging")),
            kBatteryReader);
  add_skill(at_location_skill(skill_of("AtDestination"), leaf("AtDestination"), "Destination"), kLocalization);
  add_skill(goto_skill(skill_of("GoToDestination"), leaf("GoToDestination"), "Destination"), kNavigation);
  add_skill(at_location_skill(skill_of("AtRechargingStation"), leaf("AtRechargingStation"), "RechargingStation"),
            kLocalization);
  add_skill(goto_skill(skill_of("GoToRechargingStation"), leaf("GoToRechargingStation"), "RechargingStation"),
            kNavigation);
  {
    ProcessDef w = wait_for_user_skill(skill_of("WaitForUser"), leaf("WaitForUser"));
    layers[w.name] = Layer::Skill;
    def.processes.push_back(std::move(w));
  }

  def.processes.push_back(battery_reader({skill_of("BatteryLevelAbove30")}, {skill_of("BatteryNotRecharging")},
                                         *world, config.battery));
  def.processes.push_back(
      navigation({skill_of("GoToDestination"), skill_of("GoToRechargingStation")}, world, config.battery));
  def.processes.push_back(localization({skill_of("AtDestination"), skill_of("AtRechargingStation")}, *world));
  for (const char* c : {kBatteryReader, kNavigation, kLocalization}) layers[c] = Layer::Component;

  check_layering(def, layers);
  ChannelKey tick = compiled.tick_channel;
  return Scenario{config, world, std::move(tree), std::move(compiled), std::move(layers), ChannelSystem(std::move(def)),
                  tick};
}

RunOptions Scenario::run_options(const ChannelSystem& cs) const {
  RunOptions o;
  o.horizon = config.horizon;
  o.tick_channel = tick_channel;

  struct Action {
    std::uint64_t tick;
    int slot;
    Value value;
  };
  std::vector<Action> actions;
  const int forced = cs.var_slot(kBatteryReader, "forced");
  const int frozen = cs.var_slot(kNavigation, "frozen");
  for (const auto& f : config.faults) {
    switch (f.kind) {
      case Fault::Kind::ForceBatteryLevel: actions.push_back({f.at_tick, forced, Value{f.value}}); break;
      case Fault::Kind::OverrideNavigation:
        actions.push_back({f.from_tick, frozen, Value{true}});
        actions.push_back({f.to_tick, frozen, Value{false}});
        break;
      case Fault::Kind::SkillThresholdBug: break;  // applied when building
    }
  }
  if (!actions.empty()) {
    o.on_tick = [&cs, actions](std::uint64_t tick, Configuration& cfg) {
      for (const auto& a : actions)
        if (a.tick == tick) cs.assign(cfg, a.slot, a.value);
    };
  }
  return o;
}

std::string default_requirements(std::int64_t theta) {
  return "param theta = " + std::to_string(theta) +
         "\n"
         "\n"
         "# The level read by the battery condition never drops below 20.\n"
         "property phi1 = always (BatteryReader, BatteryLevel, m[1] = <ok> implies m[2] >= 20);\n"
         "\n"
         "# Low battery while heading to the destination: the robot must be sent\n"
         "# to the recharging station within theta ticks.\n"
         "property phi2 = always ((Navigation, GoToDestination, m[1] = <ok> and m[2] = <running>)\n"
         "    and (BatteryReader, BatteryLevel, m[1] = <ok> and m[2] <= 30)\n"
         "    implies time_until (GoToRechargingStation, Navigation,\n"
         "        m[1] = <start_navigation> and m[2] = <RechargingStation>) < theta);\n";
}

std::vector<monitor::MonitorGraph> monitors_from_properties(const std::string& text, const Scenario& s,
                                                            const std::map<std::string, std::int64_t>& params) {
  scope::ParseOptions opts;
  std::set<std::string> names;
  for (const auto& p : s.system.processes()) names.insert(p.name);
  opts.processes = names;
  auto props = scope::parse_property_file(text, params, opts);
  monitor::CompileOptions copts;
  copts.tick_channel = s.tick_channel;
  std::vector<monitor::MonitorGraph> out;
  for (const auto& p : props.properties)
    out.push_back(monitor::synthesize(monitor::compile_from_scope(p.name, *p.formula, copts)));
  return out;
}

RobotState robot_state(const Scenario& s, const ChannelSystem& cs, const Configuration& cfg) {
  RobotState r;
  r.pose = s.world->cell(static_cast<int>(std::get<std::int64_t>(cfg.vars[cs.var_slot(kNavigation, kPoseVar)])));
  r.level = std::get<std::int64_t>(cfg.vars[cs.var_slot(kBatteryReader, kLevelVar)]);
  r.charging = std::get<bool>(cfg.vars[cs.var_slot(kBatteryReader, "charging")]);
  return r;
}

}  // namespace btrv::scenario
