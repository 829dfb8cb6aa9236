#pragma once

#include <memory>
#include <string>
#include <vector>

#include "btrv/core/program_graph.hpp"
#include "btrv/scenario/config.hpp"
#include "btrv/scenario/grid.hpp"

namespace btrv::scenario {

// Process names of the functional layer.
inline constexpr const char* kTickGenerator = "TickGenerator";
inline constexpr const char* kBatteryReader = "BatteryReader";
inline constexpr const char* kNavigation = "Navigation";
inline constexpr const char* kLocalization = "Localization";

// Shared variables of the robot platform, written only by components.
inline constexpr const char* kLevelVar = "level";
inline constexpr const char* kPoseVar = "pose";
inline constexpr const char* kHeadingVar = "heading";

/// Ticks `root` forever: !(TickGenerator, root, [<tick>]) then waits for the
/// root's status.
ProcessDef tick_generator(const std::string& root);

/// Asks BatteryReader for the level; success iff [<ok>, v] with v >= threshold.
ProcessDef battery_level_skill(const std::string& name, const std::string& leaf, std::int64_t threshold);

/// Asks BatteryReader whether it is charging; success iff [<ok>, false].
ProcessDef battery_not_recharging_skill(const std::string& name, const std::string& leaf);

/// Asks Localization where the robot is; success iff [<ok>, <target>].
ProcessDef at_location_skill(const std::string& name, const std::string& leaf, const std::string& target);

/// Starts navigation to `target` on the first tick, polls its status on the
/// following ones and maps [<ok>, <running>] / [<ok>, <reached>] / anything
/// else to running / success / failure. A [<halt>] request sends [<stop>].
ProcessDef goto_skill(const std::string& name, const std::string& leaf, const std::string& target);

/// Always answers [<running>].
ProcessDef wait_for_user_skill(const std::string& name, const std::string& leaf);

/// Replies [<ok>, level] to [<get_level>] (charging the battery first when
/// docked) and [<ok>, charging] to [<get_charging>]. The local `forced`
/// (-1 when off) overrides the reported level.
ProcessDef battery_reader(const std::vector<std::string>& level_clients,
                          const std::vector<std::string>& charging_clients, const GridWorld& world,
                          const BatteryConfig& battery);

/// Grid stepper standing in for a navigation stack. Handles
/// [<start_navigation>, <place>], [<get_status>] and [<stop>]; each status
/// poll while active moves the robot one cell (unless `frozen`).
ProcessDef navigation(const std::vector<std::string>& clients, std::shared_ptr<const GridWorld> world,
                      const BatteryConfig& battery);

/// Replies [<ok>, <Destination>], [<ok>, <RechargingStation>] or [<ok>, <none>].
ProcessDef localization(const std::vector<std::string>& clients, const GridWorld& world);

}  // namespace btrv::scenario
