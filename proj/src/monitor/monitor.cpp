#include "btrv/monitor/monitor.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace btrv::monitor {

namespace {

const char* const kShapes =
    "supported shapes: 'always <events on one channel>' and "
    "'always (<event> and ... implies time_until (<event>) < theta)'";

[[noreturn]] void reject(const scope::Formula& offending, const std::string& why) {
  throw NotMonitorable("not in monitorable fragment: " + why + " in '" + scope::to_string(offending) + "'; " +
                       kShapes);
}

// Boolean combination of events on a single channel, as one condition.
scope::CondPtr to_condition(const scope::Formula& f, std::optional<ChannelKey>& channel) {
  using scope::FormulaKind;
  switch (f.kind) {
    case FormulaKind::Event:
      if (channel && *channel != f.event.channel) reject(f, "events on more than one channel");
      channel = f.event.channel;
      return f.event.cond;
    case FormulaKind::Not: return scope::cnot(to_condition(*f.lhs, channel));
    case FormulaKind::And: return scope::cand(to_condition(*f.lhs, channel), to_condition(*f.rhs, channel));
    case FormulaKind::Or: return scope::cor(to_condition(*f.lhs, channel), to_condition(*f.rhs, channel));
    default: reject(f, "unsupported operator");
  }
}

void flatten_and(const scope::FormulaPtr& f, std::vector<scope::FormulaPtr>& out) {
  if (f->kind == scope::FormulaKind::And) {
    flatten_and(f->lhs, out);
    flatten_and(f->rhs, out);
  } else {
    out.push_back(f);
  }
}

std::string latch_name(const ChannelKey& k) { return "last_" + k.source + "_" + k.dest; }

ExprPtr empty_msg() { return ex::lit(Value{Message{}}); }

}  // namespace

MonitorSpec compile_from_scope(const std::string& name, const scope::Formula& phi, const CompileOptions& opts) {
  MonitorSpec spec;
  spec.name = name;
  scope::FormulaPtr body = scope::as_always(phi);
  if (!body) reject(phi, "the formula is not of the form 'always ...'");

  auto imp = scope::as_implies(*body);
  if (imp && imp->second->kind == scope::FormulaKind::TimeUntil) {
    const scope::Formula& tu = *imp->second;
    spec.pattern = MonitorSpec::Pattern::Response;
    ResponseSpec& r = spec.response;
    if (!opts.tick_channel) reject(*body, "no tick channel configured for a response property");
    r.tick_channel = *opts.tick_channel;

    if (tu.op == RelOp::Lt)
      r.theta = tu.bound;
    else if (tu.op == RelOp::Le)
      r.theta = tu.bound + 1;
    else
      reject(tu, "time_until must be bounded with < or <=");
    if (r.theta < 1) reject(tu, "a deadline of zero ticks can never be met");

    r.response = tu.event;
    if (r.response.channel == r.tick_channel) reject(tu, "the response event is on the tick channel");
    if (scope::condition_holds_quiet(*r.response.cond, Message{}))
      reject(tu, "the response condition holds on an empty channel");

    std::vector<scope::FormulaPtr> conjuncts;
    flatten_and(imp->first, conjuncts);
    std::map<ChannelKey, scope::CondPtr> by_channel;
    std::vector<ChannelKey> order;
    for (const auto& c : conjuncts) {
      if (c->kind != scope::FormulaKind::Event) reject(*c, "the trigger must be a conjunction of events");
      if (c->event.channel == r.tick_channel) reject(*c, "a trigger event is on the tick channel");
      if (scope::condition_holds_quiet(*c->event.cond, Message{}))
        reject(*c, "a trigger condition holds on an empty channel");
      auto it = by_channel.find(c->event.channel);
      if (it == by_channel.end()) {
        by_channel.emplace(c->event.channel, c->event.cond);
        order.push_back(c->event.channel);
      } else {
        it->second = scope::cand(it->second, c->event.cond);
      }
    }
    for (const auto& k : order) r.trigger.push_back({k, by_channel.at(k)});
    return spec;
  }

  spec.pattern = MonitorSpec::Pattern::Safety;
  std::optional<ChannelKey> channel;
  spec.safety.safe = to_condition(*body, channel);
  if (!channel) reject(*body, "no event");
  spec.safety.channel = *channel;
  if (!scope::condition_holds_quiet(*spec.safety.safe, Message{}))
    reject(*body, "the condition fails on an empty channel (guard it with an implication)");
  return spec;
}

MonitorGraph synthesize(const MonitorSpec& spec) {
  MonitorGraph out;
  out.spec = spec;
  ProcessDef& p = out.process;
  p.name = spec.name;
  p.observer = true;
  p.error_location = "Err";
  ProgramGraph& g = p.graph;

  if (spec.pattern == MonitorSpec::Pattern::Safety) {
    const std::string y = "y";
    g.add_var({y, Domain::message(), Value{Message{}}});
    for (const char* loc : {"I", "Obs", "Err"}) g.add_location(loc);
    g.add_initial("I");
    ExprPtr safe = scope::condition_to_expr(*spec.safety.safe, y);
    g.receive("I", nullptr, spec.safety.channel, y, "Obs");
    g.internal("Obs", safe, {}, "I");
    g.internal("Obs", ex::not_(safe), {}, "Err");
    return out;
  }

  const ResponseSpec& r = spec.response;
  std::vector<ChannelKey> data;
  for (const auto& t : r.trigger) data.push_back(t.channel);
  if (std::find(data.begin(), data.end(), r.response.channel) == data.end()) data.push_back(r.response.channel);

  for (const auto& k : data) g.add_var({latch_name(k), Domain::message(), Value{Message{}}});
  g.add_var({"tk", Domain::message(), Value{Message{}}});
  g.add_var({"ticked", Domain::boolean(), Value{false}});
  g.add_var({"timer", Domain::integer(0, r.theta), Value{std::int64_t{0}}});
  for (const char* loc : {"I", "I1", "C1", "S", "C2", "Err"}) g.add_location(loc);
  g.add_initial("I");

  ExprPtr trig;
  for (const auto& t : r.trigger) {
    ExprPtr c = scope::condition_to_expr(*t.cond, latch_name(t.channel));
    trig = trig ? ex::and_(trig, c) : c;
  }
  ExprPtr resp = scope::condition_to_expr(*r.response.cond, latch_name(r.response.channel));
  ExprPtr pending = ex::and_(trig, ex::not_(resp));
  ExprPtr no_tick = ex::compare(RelOp::Eq, ex::var("tk"), empty_msg());
  ExprPtr tick = ex::compare(RelOp::Ne, ex::var("tk"), empty_msg());
  ExprPtr ticked = ex::var("ticked");

  // Every tick starts a fresh latch window.
  auto reset = [&](std::vector<Assignment> extra) {
    for (const auto& k : data) extra.push_back({latch_name(k), empty_msg()});
    extra.push_back({"tk", empty_msg()});
    return extra;
  };

  for (const auto& k : data) g.receive("I", nullptr, k, latch_name(k), "C1");
  g.receive("I", nullptr, r.tick_channel, "tk", "I1");
  g.internal("I1", nullptr, reset({{"ticked", ex::boolean(true)}}), "I");
  g.internal("C1", pending, {}, "S");
  g.internal("C1", ex::not_(pending), {}, "I");

  g.internal("S", no_tick, {{"timer", ex::integer(r.theta)}}, "C2");
  // The first tick has identifier 0, the same as everything before it.
  g.internal("S", ex::and_(tick, ex::not_(ticked)), reset({{"ticked", ex::boolean(true)}}), "C2");
  ExprPtr expiring = ex::compare(RelOp::Le, ex::var("timer"), ex::integer(1));
  g.internal("S", ex::and_(ex::and_(tick, ticked), expiring),
             {{"timer", ex::integer(0)}, {"tk", empty_msg()}}, "Err");
  g.internal("S", ex::and_(ex::and_(tick, ticked), ex::not_(expiring)),
             reset({{"timer", ex::binary(ExprKind::Sub, ex::var("timer"), ex::integer(1))}}), "C2");

  g.receive("C2", nullptr, r.tick_channel, "tk", "S");
  for (const auto& k : data) g.receive("C2", nullptr, k, latch_name(k), "C2");
  g.internal("C2", resp, {}, "I");
  return out;
}

MonitorGraph from_process(ProcessDef process) {
  if (!process.observer) throw ModelError("process '" + process.name + "' is not declared as a monitor");
  MonitorGraph out;
  out.spec.name = process.name;
  out.process = std::move(process);
  return out;
}

ChannelSystem attach(const ChannelSystem& cs, const std::vector<MonitorGraph>& monitors) {
  SystemDef def = cs.def();
  std::set<std::string> names;
  for (const auto& p : def.processes) names.insert(p.name);
  for (const auto& m : monitors) {
    if (!names.insert(m.process.name).second)
      throw AttachError("monitor name '" + m.process.name + "' clashes with an existing process");
    for (const auto& t : m.process.graph.transitions()) {
      if (t.is_comm() && cs.channel_index(t.comm().channel) < 0)
        throw AttachError("monitor '" + m.process.name + "' watches nonexistent channel " +
                          to_string(t.comm().channel));
    }
    ProcessDef p = m.process;
    p.observer = true;
    def.processes.push_back(std::move(p));
  }
  return ChannelSystem(std::move(def));
}

std::vector<MonitorVerdict> verdicts(const ExecutionTrace& trace, const std::vector<MonitorGraph>& monitors) {
  std::vector<MonitorVerdict> out;
  for (const auto& m : monitors) {
    MonitorVerdict v;
    v.monitor = m.process.name;
    for (const auto& rec : trace.violations) {
      if (rec.monitor != v.monitor) continue;
      v.status = MonitorVerdict::Status::Violated;
      v.tick = rec.tick;
      v.position = rec.position;
      v.channel = rec.channel;
      v.message = rec.message;
      break;
    }
    out.push_back(std::move(v));
  }
  return out;
}

void check_internal_acyclic(const ProcessDef& process) {
  const ProgramGraph& g = process.graph;
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& t : g.transitions())
    if (!t.is_comm()) succ[t.from].push_back(t.to);
  std::map<std::string, int> state;  // 1 on stack, 2 done
  std::function<void(const std::string&)> dfs = [&](const std::string& loc) {
    state[loc] = 1;
    for (const auto& n : succ[loc]) {
      if (state[n] == 1)
        throw ModelError("process '" + process.name + "' has an internal cycle through " + loc + " and " + n);
      if (state[n] == 0) dfs(n);
    }
    state[loc] = 2;
  };
  for (const auto& loc : g.locations())
    if (state[loc] == 0) dfs(loc);
}

std::string to_dot(const ProcessDef& process) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  std::ostringstream os;
  os << "digraph " << quote(process.name) << " {\n  rankdir=LR;\n";
  const auto& initial = process.graph.initial_locations();
  for (const auto& loc : process.graph.locations()) {
    os << "  " << quote(loc);
    if (loc == process.error_location)
      os << " [shape=doublecircle, color=red]";
    else if (!initial.empty() && loc == initial.front())
      os << " [shape=circle, style=bold]";
    else
      os << " [shape=circle]";
    os << ";\n";
  }
  for (const auto& t : process.graph.transitions()) {
    std::string label = label_to_string(t);
    if (t.guard) label = "[" + to_string(*t.guard) + "] " + label;
    os << "  " << quote(t.from) << " -> " << quote(t.to) << " [label=" << quote(label) << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace btrv::monitor
