#include "btrv/bt/bt.hpp"

#include <cstdint>
#include <set>
#include <sstream>

#include "btrv/core/errors.hpp"

namespace btrv::bt {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Success: return "success";
    case Status::Failure: return "failure";
    case Status::Running: return "running";
  }
  return "?";
}

std::optional<Status> parse_status(std::string_view s) {
  if (s == "success") return Status::Success;
  if (s == "failure") return Status::Failure;
  if (s == "running") return Status::Running;
  return std::nullopt;
}

Message status_message(Status s) { return msg({sym(to_string(s))}); }
Message tick_message() { return msg({sym("tick")}); }
Message halt_message() { return msg({sym("halt")}); }
Message halted_message() { return msg({sym("halted")}); }

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Sequence: return "sequence";
    case NodeKind::Fallback: return "fallback";
    case NodeKind::Condition: return "condition";
    case NodeKind::Action: return "action";
  }
  return "?";
}

NodeDef sequence(std::string name, std::vector<NodeDef> children) {
  return NodeDef{NodeKind::Sequence, std::move(name), std::move(children), std::nullopt};
}

NodeDef fallback(std::string name, std::vector<NodeDef> children) {
  return NodeDef{NodeKind::Fallback, std::move(name), std::move(children), std::nullopt};
}

NodeDef condition(std::string name, SkillBinding skill) {
  return NodeDef{NodeKind::Condition, std::move(name), {}, std::move(skill)};
}

NodeDef action(std::string name, SkillBinding skill) {
  return NodeDef{NodeKind::Action, std::move(name), {}, std::move(skill)};
}

std::size_t node_count(const NodeDef& n) {
  std::size_t c = 1;
  for (const auto& ch : n.children) c += node_count(ch);
  return c;
}

namespace {

void validate_node(const NodeDef& n, std::set<std::string>& names) {
  if (n.name.empty()) throw ModelError("behavior tree node without a name");
  if (!names.insert(n.name).second) throw ModelError("duplicate behavior tree node '" + n.name + "'");
  if (n.is_leaf()) {
    if (!n.children.empty()) throw ModelError("leaf '" + n.name + "' has children");
    if (!n.skill || n.skill->skill.empty()) throw ModelError("leaf '" + n.name + "' is not bound to a skill");
    if (n.kind == NodeKind::Condition && n.skill->halt_request)
      throw ModelError("condition '" + n.name + "' cannot have a halt request");
  } else {
    if (n.children.empty()) throw ModelError(std::string(to_string(n.kind)) + " '" + n.name + "' has no children");
    if (n.skill) throw ModelError("composite '" + n.name + "' cannot bind a skill");
    for (const auto& c : n.children) validate_node(c, names);
  }
}

std::vector<ReplyRule> effective_rules(const SkillBinding& b) {
  if (!b.replies.empty()) return b.replies;
  return {{status_message(Status::Success), Status::Success},
          {status_message(Status::Failure), Status::Failure},
          {status_message(Status::Running), Status::Running}};
}

ExprPtr msg_lit(const Message& m) { return ex::lit(Value{m}); }
ExprPtr is_msg(const std::string& var, const Message& m) { return ex::compare(RelOp::Eq, ex::var(var), msg_lit(m)); }

class Compiler {
 public:
  explicit Compiler(const BehaviorTreeDef& def) : def_(def) {}

  CompiledTree run() {
    out_.root_process = proc(def_.root);
    out_.tick_channel = {def_.tick_source, out_.root_process};
    out_.status_channel = {out_.root_process, def_.tick_source};
    out_.channels.push_back({out_.tick_channel, 0});
    out_.channels.push_back({out_.status_channel, 0});
    node(def_.root, def_.tick_source);
    return std::move(out_);
  }

 private:
  std::string proc(const NodeDef& n) const { return def_.process_prefix + n.name; }

  void node(const NodeDef& n, const std::string& parent) {
    out_.node_process[n.name] = proc(n);
    if (n.is_leaf())
      leaf(n, parent);
    else
      composite(n, parent);
  }

  void composite(const NodeDef& n, const std::string& parent) {
    ProcessDef p;
    p.name = proc(n);
    ProgramGraph& g = p.graph;
    const std::size_t count = n.children.size();
    const Status cont = n.kind == NodeKind::Sequence ? Status::Success : Status::Failure;
    const Status stop = n.kind == NodeKind::Sequence ? Status::Failure : Status::Success;

    g.add_var({"st", Domain::message(), Value{Message{}}});
    g.add_var({"res", Domain::message(), Value{Message{}}});
    auto running = [](std::size_t k) { return "running_" + std::to_string(k); };
    for (std::size_t k = 1; k <= count; ++k) g.add_var({running(k), Domain::boolean(), Value{false}});

    auto loc = [](const char* base, std::size_t k) { return base + std::to_string(k); };
    // X chain: halt children after the deciding one, then reply.
    // H chain: halt everything on a request from the parent, then acknowledge.
    auto x_loc = [&](std::size_t k) { return k > count ? std::string("Reply") : loc("X", k); };
    auto h_loc = [&](std::size_t k) { return k > count ? std::string("Ack") : loc("H", k); };

    g.add_location("Idle");
    for (std::size_t k = 1; k <= count; ++k)
      for (const char* base : {"T", "W", "D"}) g.add_location(loc(base, k));
    for (std::size_t k = 1; k <= count; ++k)
      for (const char* base : {"X", "XS", "XA"}) g.add_location(loc(base, k));
    g.add_location("Reply");
    for (std::size_t k = 1; k <= count; ++k)
      for (const char* base : {"H", "HS", "HA"}) g.add_location(loc(base, k));
    g.add_location("Ack");
    g.add_initial("Idle");

    const ChannelKey up{p.name, parent};
    const ChannelKey down{parent, p.name};
    g.receive_literal("Idle", nullptr, down, tick_message(), "T1");
    g.receive_literal("Idle", nullptr, down, halt_message(), h_loc(1));

    for (std::size_t k = 1; k <= count; ++k) {
      const NodeDef& child = n.children[k - 1];
      const std::string c = proc(child);
      const std::string T = loc("T", k), W = loc("W", k), D = loc("D", k);
      g.send(T, nullptr, {p.name, c}, msg_lit(tick_message()), W);
      g.receive(W, nullptr, {c, p.name}, "st", D);
      const std::string next = k == count ? x_loc(count + 1) : loc("T", k + 1);
      std::vector<Assignment> on_cont{{running(k), ex::boolean(false)}};
      if (k == count) on_cont.push_back({"res", ex::var("st")});
      g.internal(D, is_msg("st", status_message(cont)), on_cont, next);
      g.internal(D, is_msg("st", status_message(stop)), {{running(k), ex::boolean(false)}, {"res", ex::var("st")}},
                 x_loc(k + 1));
      g.internal(D, is_msg("st", status_message(Status::Running)),
                 {{running(k), ex::boolean(true)}, {"res", ex::var("st")}}, x_loc(k + 1));

      out_.channels.push_back({{p.name, c}, 0});
      out_.channels.push_back({{c, p.name}, 0});
    }

    for (std::size_t k = 1; k <= count; ++k) {
      const std::string c = proc(n.children[k - 1]);
      for (bool from_parent : {false, true}) {
        const std::string at = from_parent ? h_loc(k) : x_loc(k);
        const std::string sending = loc(from_parent ? "HS" : "XS", k);
        const std::string acking = loc(from_parent ? "HA" : "XA", k);
        const std::string after = from_parent ? h_loc(k + 1) : x_loc(k + 1);
        g.internal(at, ex::var(running(k)), {{running(k), ex::boolean(false)}}, sending);
        g.internal(at, ex::not_(ex::var(running(k))), {}, after);
        g.send(sending, nullptr, {p.name, c}, msg_lit(halt_message()), acking);
        g.receive_literal(acking, nullptr, {c, p.name}, halted_message(), after);
      }
    }
    g.send("Reply", nullptr, up, ex::var("res"), "Idle");
    g.send("Ack", nullptr, up, msg_lit(halted_message()), "Idle");

    out_.processes.push_back(std::move(p));
    for (const auto& child : n.children) node(child, proc(n));
  }

  void leaf(const NodeDef& n, const std::string& parent) {
    const SkillBinding& b = *n.skill;
    ProcessDef p;
    p.name = proc(n);
    ProgramGraph& g = p.graph;
    g.add_var({"rep", Domain::message(), Value{Message{}}});
    g.add_var({"res", Domain::message(), Value{Message{}}});
    g.add_var({"bad_replies", Domain::integer(0, INT64_MAX), Value{std::int64_t{0}}});
    for (const char* l : {"Idle", "Req", "Wait", "Map", "Reply", "Halt", "Ack"}) g.add_location(l);
    if (b.halt_request) g.add_location("HaltWait");
    g.add_initial("Idle");

    const ChannelKey up{p.name, parent};
    const ChannelKey down{parent, p.name};
    const ChannelKey req{p.name, b.skill};
    const ChannelKey rep{b.skill, p.name};

    g.receive_literal("Idle", nullptr, down, tick_message(), "Req");
    g.send("Req", nullptr, req, msg_lit(b.request), "Wait");
    g.receive("Wait", nullptr, rep, "rep", "Map");
    ExprPtr matched;
    for (const auto& rule : effective_rules(b)) {
      ExprPtr m = is_msg("rep", rule.reply);
      g.internal("Map", m, {{"res", msg_lit(status_message(rule.status))}}, "Reply");
      matched = matched ? ex::or_(matched, m) : m;
    }
    g.internal("Map", ex::not_(matched),
               {{"res", msg_lit(status_message(Status::Failure))},
                {"bad_replies", ex::binary(ExprKind::Add, ex::var("bad_replies"), ex::integer(1))}},
               "Reply");
    g.send("Reply", nullptr, up, ex::var("res"), "Idle");

    g.receive_literal("Idle", nullptr, down, halt_message(), "Halt");
    if (b.halt_request) {
      // The skill's answer to a halt carries no status; it is read and dropped.
      g.send("Halt", nullptr, req, msg_lit(*b.halt_request), "HaltWait");
      g.receive("HaltWait", nullptr, rep, "rep", "Ack");
    } else {
      g.internal("Halt", nullptr, {}, "Ack");
    }
    g.send("Ack", nullptr, up, msg_lit(halted_message()), "Idle");

    out_.channels.push_back({req, 1});
    out_.channels.push_back({rep, 1});
    out_.processes.push_back(std::move(p));
  }

  const BehaviorTreeDef& def_;
  CompiledTree out_;
};

void pretty_node(std::ostringstream& os, const NodeDef& n, int depth) {
  os << std::string(static_cast<std::size_t>(depth) * 2, ' ');
  switch (n.kind) {
    case NodeKind::Sequence: os << "→ " << n.name; break;
    case NodeKind::Fallback: os << "? " << n.name; break;
    case NodeKind::Condition: os << "(" << n.name << ")"; break;
    case NodeKind::Action: os << "[" << n.name << "]"; break;
  }
  if (n.skill && n.skill->skill != n.name) os << " -> " << n.skill->skill;
  os << "\n";
  for (const auto& c : n.children) pretty_node(os, c, depth + 1);
}

void text_node(std::ostringstream& os, const NodeDef& n, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  os << pad << to_string(n.kind) << " " << n.name;
  if (n.is_leaf()) {
    const SkillBinding& b = *n.skill;
    os << " -> " << b.skill;
    if (b.request != tick_message()) os << " request " << format_message(b.request);
    if (b.halt_request) os << " halt " << format_message(*b.halt_request);
    for (const auto& r : b.replies) os << " on " << format_message(r.reply) << " " << to_string(r.status);
    os << "\n";
    return;
  }
  os << " {\n";
  for (const auto& c : n.children) text_node(os, c, depth + 1);
  os << pad << "}\n";
}

}  // namespace

void validate(const BehaviorTreeDef& def) {
  if (def.tick_source.empty()) throw ModelError("behavior tree without a tick source");
  std::set<std::string> names;
  validate_node(def.root, names);
}

CompiledTree compile_bt(const BehaviorTreeDef& def) {
  validate(def);
  return Compiler(def).run();
}

std::string pretty(const BehaviorTreeDef& def) {
  std::ostringstream os;
  pretty_node(os, def.root, 0);
  return os.str();
}

std::string to_text(const BehaviorTreeDef& def) {
  std::ostringstream os;
  os << "tree " << def.name << "\n";
  text_node(os, def.root, 0);
  return os.str();
}

}  // namespace btrv::bt
