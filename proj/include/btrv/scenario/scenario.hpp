#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "btrv/bt/bt.hpp"
#include "btrv/core/channel_system.hpp"
#include "btrv/core/engine.hpp"
#include "btrv/monitor/monitor.hpp"
#include "btrv/scenario/components.hpp"
#include "btrv/scenario/config.hpp"
#include "btrv/scenario/grid.hpp"

namespace btrv::scenario {

/// The mission tree: go to the destination and wait for the user, unless
/// the battery is low or charging, in which case dock at the station.
///
///     ? Root
///       → Mission
///         (BatteryLevelAbove30) (BatteryNotRecharging)
///         ? Navigate: (AtDestination) [GoToDestination]
///         (WaitForUser)
///       ? Dock: (AtRechargingStation) [GoToRechargingStation]
bt::BehaviorTreeDef fig1_tree();

/// Skill process serving each leaf of fig1_tree(). The battery condition is
/// served by the skill named BatteryLevel; every other skill shares its
/// leaf's name.
const std::map<std::string, std::string>& fig1_skills();

enum class Layer { TickSource = 0, Tree = 1, Skill = 2, Component = 3 };

/// Throws ModelError unless every channel joins adjacent layers (or two
/// tree nodes, or two components). Monitors are ignored.
void check_layering(const SystemDef& def, const std::map<std::string, Layer>& layers);

struct Scenario {
  ScenarioConfig config;
  std::shared_ptr<const GridWorld> world;
  bt::BehaviorTreeDef tree;
  bt::CompiledTree compiled;
  std::map<std::string, Layer> layers;
  ChannelSystem system;  // unmonitored
  ChannelKey tick_channel;

  /// Engine options with the configured horizon and the fault hooks, whose
  /// variable slots are resolved in `cs` (the plain or instrumented system).
  RunOptions run_options(const ChannelSystem& cs) const;
};

/// Assembles tick generator, compiled tree, skills and components. Throws
/// ModelError when the map is malformed, the destination or station cannot
/// be reached, or the station is more than 10% of the battery away from
/// some reachable cell.
Scenario build_scenario(const ScenarioConfig& config);

/// The two mission requirements as a property file, with `theta` bound.
std::string default_requirements(std::int64_t theta = 100);

/// Compiles every property of a property file into a monitor graph.
std::vector<monitor::MonitorGraph> monitors_from_properties(const std::string& text, const Scenario& s,
                                                            const std::map<std::string, std::int64_t>& params = {});

/// Robot state read back from a configuration.
struct RobotState {
  Cell pose;
  std::int64_t level = 0;
  bool charging = false;
};
RobotState robot_state(const Scenario& s, const ChannelSystem& cs, const Configuration& cfg);

}  // namespace btrv::scenario
