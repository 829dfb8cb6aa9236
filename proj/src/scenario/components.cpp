#include "btrv/scenario/components.hpp"

#include <algorithm>

#include "btrv/bt/bt.hpp"
#include "btrv/core/errors.hpp"

namespace btrv::scenario {

namespace {

ExprPtr lit(const Message& m) { return ex::lit(Value{m}); }
ExprPtr is(const std::string& var, const Message& m) { return ex::compare(RelOp::Eq, ex::var(var), lit(m)); }
ExprPtr part(const std::string& var, std::int64_t i) { return ex::index(ex::var(var), i); }
ExprPtr eq(ExprPtr a, ExprPtr b) { return ex::compare(RelOp::Eq, std::move(a), std::move(b)); }
ExprPtr ok_and(const std::string& var, ExprPtr cond) {
  return ex::and_(eq(part(var, 1), ex::symbol("ok")), std::move(cond));
}
Message reply(std::string_view a, std::string_view b) { return msg({sym(a), sym(b)}); }

const Message kSuccess = bt::status_message(bt::Status::Success);
const Message kFailure = bt::status_message(bt::Status::Failure);
const Message kRunning = bt::status_message(bt::Status::Running);

// Request/compute/reply skill shape shared by the query skills:
// Idle -?q-> Ask -!request-> Wait -?answer-> Decide -[good|bad]-> Reply -!res-> Idle
ProcessDef query_skill(const std::string& name, const std::string& leaf, const std::string& component,
                       const Message& request, ExprPtr good) {
  ProcessDef p;
  p.name = name;
  ProgramGraph& g = p.graph;
  for (const char* v : {"q", "ans", "res"}) g.add_var({v, Domain::message(), Value{Message{}}});
  for (const char* l : {"Idle", "Ask", "Wait", "Decide", "Reply"}) g.add_location(l);
  g.add_initial("Idle");
  g.receive("Idle", nullptr, {leaf, name}, "q", "Ask");
  g.send("Ask", nullptr, {name, component}, lit(request), "Wait");
  g.receive("Wait", nullptr, {component, name}, "ans", "Decide");
  g.internal("Decide", good, {{"res", lit(kSuccess)}}, "Reply");
  g.internal("Decide", ex::not_(good), {{"res", lit(kFailure)}}, "Reply");
  g.send("Reply", nullptr, {name, leaf}, ex::var("res"), "Idle");
  return p;
}

Cell place_cell(const GridWorld& world, Symbol place) {
  if (place == Symbol("Destination")) return world.destination();
  return world.station();
}

}  // namespace

ProcessDef tick_generator(const std::string& root) {
  ProcessDef p;
  p.name = kTickGenerator;
  ProgramGraph& g = p.graph;
  g.add_var({"st", Domain::message(), Value{Message{}}});
  g.add_location("Idle").add_location("Wait").add_initial("Idle");
  g.send("Idle", nullptr, {kTickGenerator, root}, lit(bt::tick_message()), "Wait");
  g.receive("Wait", nullptr, {root, kTickGenerator}, "st", "Idle");
  return p;
}

ProcessDef battery_level_skill(const std::string& name, const std::string& leaf, std::int64_t threshold) {
  ExprPtr above = ex::compare(RelOp::Ge, part("ans", 2), ex::var("threshold"));
  ProcessDef p = query_skill(name, leaf, kBatteryReader, msg({sym("get_level")}), ok_and("ans", above));
  p.graph.add_var({"threshold", Domain::integer(0, 100), Value{threshold}});
  return p;
}

ProcessDef battery_not_recharging_skill(const std::string& name, const std::string& leaf) {
  ExprPtr idle = eq(part("ans", 2), ex::boolean(false));
  return query_skill(name, leaf, kBatteryReader, msg({sym("get_charging")}), ok_and("ans", idle));
}

ProcessDef at_location_skill(const std::string& name, const std::string& leaf, const std::string& target) {
  ExprPtr here = eq(part("ans", 2), ex::symbol(target));
  return query_skill(name, leaf, kLocalization, msg({sym("get_location")}), ok_and("ans", here));
}

ProcessDef goto_skill(const std::string& name, const std::string& leaf, const std::string& target) {
  ProcessDef p;
  p.name = name;
  ProgramGraph& g = p.graph;
  for (const char* v : {"q", "ans", "res"}) g.add_var({v, Domain::message(), Value{Message{}}});
  g.add_var({"active", Domain::boolean(), Value{false}});
  for (const char* l : {"Idle", "Got", "Start", "Poll", "NavWait", "Map", "Reply", "Stop", "StopWait", "Halted",
                        "HaltReply"})
    g.add_location(l);
  g.add_initial("Idle");

  const ChannelKey from_leaf{leaf, name}, to_leaf{name, leaf};
  const ChannelKey to_nav{name, kNavigation}, from_nav{kNavigation, name};
  ExprPtr halt = is("q", bt::halt_message());
  ExprPtr active = ex::var("active");

  g.receive("Idle", nullptr, from_leaf, "q", "Got");
  g.internal("Got", halt, {}, "Stop");
  g.internal("Got", ex::and_(ex::not_(halt), ex::not_(active)), {}, "Start");
  g.internal("Got", ex::and_(ex::not_(halt), active), {}, "Poll");
  g.send("Start", nullptr, to_nav, lit(reply("start_navigation", target)), "NavWait");
  g.send("Poll", nullptr, to_nav, lit(msg({sym("get_status")})), "NavWait");
  g.receive("NavWait", nullptr, from_nav, "ans", "Map");
  ExprPtr running = is("ans", reply("ok", "running"));
  ExprPtr reached = is("ans", reply("ok", "reached"));
  g.internal("Map", running, {{"active", ex::boolean(true)}, {"res", lit(kRunning)}}, "Reply");
  g.internal("Map", reached, {{"active", ex::boolean(false)}, {"res", lit(kSuccess)}}, "Reply");
  g.internal("Map", ex::not_(ex::or_(running, reached)), {{"active", ex::boolean(false)}, {"res", lit(kFailure)}},
             "Reply");
  g.send("Reply", nullptr, to_leaf, ex::var("res"), "Idle");

  g.send("Stop", nullptr, to_nav, lit(msg({sym("stop")})), "StopWait");
  g.receive("StopWait", nullptr, from_nav, "ans", "Halted");
  g.internal("Halted", nullptr, {{"active", ex::boolean(false)}}, "HaltReply");
  g.send("HaltReply", nullptr, to_leaf, lit(msg({sym("ok")})), "Idle");
  return p;
}

ProcessDef wait_for_user_skill(const std::string& name, const std::string& leaf) {
  ProcessDef p;
  p.name = name;
  ProgramGraph& g = p.graph;
  g.add_var({"q", Domain::message(), Value{Message{}}});
  g.add_location("Idle").add_location("Reply").add_initial("Idle");
  g.receive("Idle", nullptr, {leaf, name}, "q", "Reply");
  g.send("Reply", nullptr, {name, leaf}, lit(kRunning), "Idle");
  return p;
}

ProcessDef battery_reader(const std::vector<std::string>& level_clients,
                          const std::vector<std::string>& charging_clients, const GridWorld& world,
                          const BatteryConfig& battery) {
  ProcessDef p;
  p.name = kBatteryReader;
  ProgramGraph& g = p.graph;
  g.add_var({"q", Domain::message(), Value{Message{}}});
  g.add_var({"charging", Domain::boolean(), Value{false}});
  g.add_var({"forced", Domain::integer(-1, 100), Value{std::int64_t{-1}}});
  g.add_location("Idle").add_initial("Idle");

  ExprPtr level = ex::var(kLevelVar);
  ExprPtr docked = eq(ex::var(kPoseVar), ex::integer(world.index(world.station())));
  ExprPtr not_full = ex::compare(RelOp::Lt, level, ex::integer(100));
  ExprPtr charge = ex::and_(docked, not_full);
  ExprPtr forced = ex::var("forced");
  ExprPtr is_forced = ex::compare(RelOp::Ge, forced, ex::integer(0));

  for (const auto& c : level_clients) {
    const std::string read = "Level_" + c, answer = "LevelReply_" + c;
    g.add_location(read).add_location(answer);
    g.receive("Idle", nullptr, {c, kBatteryReader}, "q", read);
    g.internal(read, charge,
               {{kLevelVar, ex::call(ExprKind::Min, {ex::integer(100),
                                                     ex::binary(ExprKind::Add, level,
                                                                ex::integer(battery.charge_per_query))})},
                {"charging", ex::boolean(true)}},
               answer);
    g.internal(read, ex::not_(charge), {{"charging", ex::boolean(false)}}, answer);
    g.send(answer, ex::not_(is_forced), {kBatteryReader, c}, ex::make_message({ex::symbol("ok"), level}), "Idle");
    g.send(answer, is_forced, {kBatteryReader, c}, ex::make_message({ex::symbol("ok"), forced}), "Idle");
  }
  for (const auto& c : charging_clients) {
    const std::string read = "Charging_" + c, answer = "ChargingReply_" + c;
    g.add_location(read).add_location(answer);
    g.receive("Idle", nullptr, {c, kBatteryReader}, "q", read);
    g.internal(read, nullptr, {{"charging", charge}}, answer);
    g.send(answer, nullptr, {kBatteryReader, c}, ex::make_message({ex::symbol("ok"), ex::var("charging")}), "Idle");
  }
  return p;
}

ProcessDef navigation(const std::vector<std::string>& clients, std::shared_ptr<const GridWorld> world,
                      const BatteryConfig& battery) {
  ProcessDef p;
  p.name = kNavigation;
  ProgramGraph& g = p.graph;
  g.add_var({"q", Domain::message(), Value{Message{}}});
  g.add_var({"out", Domain::message(), Value{Message{}}});
  g.add_var({"target", Domain::symbols({Symbol("none"), Symbol("Destination"), Symbol("RechargingStation")}),
             Value{Symbol("none")}});
  g.add_var({"active", Domain::boolean(), Value{false}});
  g.add_var({"frozen", Domain::boolean(), Value{false}});
  g.add_var({"moves", Domain::integer(0, INT64_MAX), Value{std::int64_t{0}}});
  g.add_location("Idle").add_initial("Idle");

  const std::int64_t drain_every = battery.drain_every;
  auto handle = std::make_shared<NativeEffect>();
  handle->name = "navigate";
  handle->fn = [world, drain_every](VarAccess& vars) {
    const Message& q = vars.get_message("q");
    const Cell pose = world->cell(static_cast<int>(vars.get_int(kPoseVar)));
    const auto kind = q.at(1);
    auto out = [&](Message m) { vars.set("out", Value{std::move(m)}); };

    if (kind == Scalar{Symbol("start_navigation")}) {
      const auto place = q.at(2);
      const Symbol* s = place ? std::get_if<Symbol>(&*place) : nullptr;
      if (!s || (*s != Symbol("Destination") && *s != Symbol("RechargingStation"))) {
        vars.set("active", Value{false});
        return out(msg({sym("path_not_found")}));
      }
      const Cell goal = place_cell(*world, *s);
      if (world->distance(pose, goal) < 0) {
        vars.set("active", Value{false});
        return out(msg({sym("path_not_found")}));
      }
      vars.set("target", Value{*s});
      vars.set("active", Value{!(pose == goal)});
      return out(reply("ok", pose == goal ? "reached" : "running"));
    }
    if (kind == Scalar{Symbol("get_status")}) {
      const Symbol target = vars.get_symbol("target");
      if (target == Symbol("none")) return out(reply("ok", "idle"));
      const Cell goal = place_cell(*world, target);
      if (!vars.get_bool("active")) return out(reply("ok", pose == goal ? "reached" : "idle"));
      Cell now = pose;
      if (!vars.get_bool("frozen")) {
        auto next = world->next_step(pose, goal);
        if (!next) {
          vars.set("active", Value{false});
          return out(msg({sym("path_not_found")}));
        }
        now = *next;
        vars.set(kPoseVar, Value{std::int64_t{world->index(now)}});
        vars.set(kHeadingVar, Value{static_cast<std::int64_t>(heading_between(pose, now))});
        const std::int64_t moves = vars.get_int("moves") + 1;
        vars.set("moves", Value{moves});
        if (moves % drain_every == 0)
          vars.set(kLevelVar, Value{std::max<std::int64_t>(0, vars.get_int(kLevelVar) - 1)});
      }
      if (now == goal) {
        vars.set("active", Value{false});
        return out(reply("ok", "reached"));
      }
      return out(reply("ok", "running"));
    }
    if (kind == Scalar{Symbol("stop")}) {
      vars.set("active", Value{false});
      return out(reply("ok", "stopped"));
    }
    out(msg({sym("unknown_request")}));
  };

  for (const auto& c : clients) {
    const std::string busy = "Handle_" + c, answer = "Reply_" + c;
    g.add_location(busy).add_location(answer);
    g.receive("Idle", nullptr, {c, kNavigation}, "q", busy);
    g.internal(busy, nullptr, {}, answer, handle);
    g.send(answer, nullptr, {kNavigation, c}, ex::var("out"), "Idle");
  }
  return p;
}

ProcessDef localization(const std::vector<std::string>& clients, const GridWorld& world) {
  ProcessDef p;
  p.name = kLocalization;
  ProgramGraph& g = p.graph;
  g.add_var({"q", Domain::message(), Value{Message{}}});
  g.add_location("Idle").add_initial("Idle");
  ExprPtr at_dest = eq(ex::var(kPoseVar), ex::integer(world.index(world.destination())));
  ExprPtr at_station = eq(ex::var(kPoseVar), ex::integer(world.index(world.station())));
  for (const auto& c : clients) {
    const std::string answer = "Reply_" + c;
    g.add_location(answer);
    g.receive("Idle", nullptr, {c, kLocalization}, "q", answer);
    g.send(answer, at_dest, {kLocalization, c}, lit(reply("ok", "Destination")), "Idle");
    g.send(answer, at_station, {kLocalization, c}, lit(reply("ok", "RechargingStation")), "Idle");
    g.send(answer, ex::not_(ex::or_(at_dest, at_station)), {kLocalization, c}, lit(reply("ok", "none")), "Idle");
  }
  return p;
}

}  // namespace btrv::scenario
