#include "btrv/scenario/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "btrv/core/errors.hpp"

namespace btrv::scenario {

using nlohmann::json;

std::string_view to_string(Fault::Kind k) {
  switch (k) {
    case Fault::Kind::ForceBatteryLevel: return "ForceBatteryLevel";
    case Fault::Kind::SkillThresholdBug: return "SkillThresholdBug";
    case Fault::Kind::OverrideNavigation: return "OverrideNavigation";
  }
  return "?";
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  c.map = {
      "############",
      "#@.........#",
      "#.##.#####.#",
      "#.#R.#...#.#",
      "#.##.#.#.#.#",
      "#......#..D#",
      "############",
  };
  return c;
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(std::string("config key '") + key + "': " + e.what());
  }
}

Fault parse_fault(const json& j) {
  if (!j.is_object()) throw Error("config: each fault must be an object");
  std::string kind;
  read(j, "kind", kind);
  Fault f;
  if (kind == "ForceBatteryLevel") {
    f.kind = Fault::Kind::ForceBatteryLevel;
    read(j, "value", f.value);
    read(j, "at_tick", f.at_tick);
    if (f.value < 0 || f.value > 100) throw Error("config: ForceBatteryLevel value must be within 0..100");
  } else if (kind == "SkillThresholdBug") {
    f.kind = Fault::Kind::SkillThresholdBug;
    read(j, "skill", f.skill);
    read(j, "threshold", f.threshold);
    if (f.threshold < 0 || f.threshold > 100) throw Error("config: SkillThresholdBug threshold must be within 0..100");
  } else if (kind == "OverrideNavigation") {
    f.kind = Fault::Kind::OverrideNavigation;
    read(j, "from_tick", f.from_tick);
    read(j, "to_tick", f.to_tick);
    if (f.to_tick < f.from_tick) throw Error("config: OverrideNavigation ends before it starts");
  } else {
    throw Error("config: unknown fault kind '" + kind + "'");
  }
  return f;
}

}  // namespace

ScenarioConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error("config: top level must be an object");
  ScenarioConfig c = default_config();
  read(j, "map", c.map);
  read(j, "threshold", c.threshold);
  read(j, "theta", c.theta);
  read(j, "seed", c.seed);
  read(j, "horizon", c.horizon);
  if (j.contains("battery")) {
    const json& b = j.at("battery");
    read(b, "initial", c.battery.initial);
    read(b, "drain_every", c.battery.drain_every);
    read(b, "charge_per_query", c.battery.charge_per_query);
  }
  if (j.contains("faults")) {
    if (!j.at("faults").is_array()) throw Error("config: 'faults' must be an array");
    for (const auto& f : j.at("faults")) c.faults.push_back(parse_fault(f));
  }
  if (c.battery.initial < 0 || c.battery.initial > 100) throw Error("config: battery.initial must be within 0..100");
  if (c.battery.drain_every < 1) throw Error("config: battery.drain_every must be positive");
  if (c.battery.charge_per_query < 1) throw Error("config: battery.charge_per_query must be positive");
  if (c.theta < 1) throw Error("config: theta must be positive");
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::string to_json(const ScenarioConfig& c) {
  json j;
  j["map"] = c.map;
  j["battery"] = {{"initial", c.battery.initial},
                  {"drain_every", c.battery.drain_every},
                  {"charge_per_query", c.battery.charge_per_query}};
  j["threshold"] = c.threshold;
  j["theta"] = c.theta;
  j["seed"] = c.seed;
  j["horizon"] = c.horizon;
  j["faults"] = json::array();
  for (const auto& f : c.faults) {
    json o{{"kind", std::string(to_string(f.kind))}};
    switch (f.kind) {
      case Fault::Kind::ForceBatteryLevel:
        o["value"] = f.value;
        o["at_tick"] = f.at_tick;
        break;
      case Fault::Kind::SkillThresholdBug:
        o["skill"] = f.skill;
        o["threshold"] = f.threshold;
        break;
      case Fault::Kind::OverrideNavigation:
        o["from_tick"] = f.from_tick;
        o["to_tick"] = f.to_tick;
        break;
    }
    j["faults"].push_back(std::move(o));
  }
  return j.dump(2);
}

}  // namespace btrv::scenario
