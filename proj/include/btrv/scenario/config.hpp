#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace btrv::scenario {

struct BatteryConfig {
  std::int64_t initial = 33;          // percent
  std::int64_t drain_every = 3;       // lose 1% every this many cells moved
  std::int64_t charge_per_query = 10; // gained per level reading while docked
};

struct Fault {
  enum class Kind { ForceBatteryLevel, SkillThresholdBug, OverrideNavigation };

  Kind kind = Kind::ForceBatteryLevel;
  std::int64_t value = 0;      // ForceBatteryLevel
  std::uint64_t at_tick = 0;   // ForceBatteryLevel
  std::string skill;           // SkillThresholdBug
  std::int64_t threshold = 0;  // SkillThresholdBug
  std::uint64_t from_tick = 0; // OverrideNavigation, inclusive
  std::uint64_t to_tick = 0;   // OverrideNavigation, exclusive
};

std::string_view to_string(Fault::Kind k);

struct ScenarioConfig {
  std::vector<std::string> map;
  BatteryConfig battery;
  std::int64_t threshold = 30;  // BatteryLevelAbove30
  std::int64_t theta = 100;     // response deadline in ticks
  std::uint64_t seed = 1;
  std::uint64_t horizon = 5000; // engine steps
  std::vector<Fault> faults;
};

/// The desk-scale service-robot map and parameters.
ScenarioConfig default_config();

/// Reads a JSON config; absent keys keep their defaults. Throws Error with
/// the offending key on malformed input.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::string& path);
std::string to_json(const ScenarioConfig& config);

}  // namespace btrv::scenario
