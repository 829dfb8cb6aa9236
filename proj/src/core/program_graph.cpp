#include "btrv/core/program_graph.hpp"

#include <algorithm>
#include <set>

#include "btrv/core/errors.hpp"

namespace btrv {

std::string to_string(const ChannelKey& key) { return key.source + "->" + key.dest; }

std::int64_t VarAccess::get_int(const std::string& name) const {
  const Value& v = get(name);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw EvalError("variable '" + name + "' is not an integer");
}

bool VarAccess::get_bool(const std::string& name) const {
  const Value& v = get(name);
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw EvalError("variable '" + name + "' is not a boolean");
}

Symbol VarAccess::get_symbol(const std::string& name) const {
  const Value& v = get(name);
  if (const auto* s = std::get_if<Symbol>(&v)) return *s;
  throw EvalError("variable '" + name + "' is not a symbol");
}

const Message& VarAccess::get_message(const std::string& name) const {
  const Value& v = get(name);
  if (const auto* m = std::get_if<Message>(&v)) return *m;
  throw EvalError("variable '" + name + "' is not a message");
}

ProgramGraph& ProgramGraph::add_location(const std::string& name) {
  if (location_index(name) < 0) locations_.push_back(name);
  return *this;
}

ProgramGraph& ProgramGraph::add_var(VarDecl decl) {
  if (find_var(decl.name) != nullptr) throw ModelError("duplicate variable '" + decl.name + "'");
  vars_.push_back(std::move(decl));
  return *this;
}

ProgramGraph& ProgramGraph::add_initial(const std::string& location) {
  add_location(location);
  if (std::find(initial_.begin(), initial_.end(), location) == initial_.end()) initial_.push_back(location);
  return *this;
}

ProgramGraph& ProgramGraph::set_initial_condition(ExprPtr g0) {
  g0_ = std::move(g0);
  return *this;
}

ProgramGraph& ProgramGraph::add_transition(Transition t) {
  add_location(t.from);
  add_location(t.to);
  transitions_.push_back(std::move(t));
  return *this;
}

ProgramGraph& ProgramGraph::internal(const std::string& from, ExprPtr guard, std::vector<Assignment> assigns,
                                     const std::string& to, std::shared_ptr<const NativeEffect> native) {
  Action a;
  a.assignments = std::move(assigns);
  a.native = std::move(native);
  return add_transition(Transition{from, std::move(guard), std::move(a), to});
}

ProgramGraph& ProgramGraph::send(const std::string& from, ExprPtr guard, ChannelKey ch, ExprPtr payload,
                                 const std::string& to) {
  CommAction c;
  c.kind = CommKind::Send;
  c.channel = std::move(ch);
  c.payload = std::move(payload);
  return add_transition(Transition{from, std::move(guard), std::move(c), to});
}

ProgramGraph& ProgramGraph::receive(const std::string& from, ExprPtr guard, ChannelKey ch, std::string var,
                                    const std::string& to) {
  CommAction c;
  c.kind = CommKind::Receive;
  c.channel = std::move(ch);
  c.var = std::move(var);
  return add_transition(Transition{from, std::move(guard), std::move(c), to});
}

ProgramGraph& ProgramGraph::receive_literal(const std::string& from, ExprPtr guard, ChannelKey ch, Message literal,
                                            const std::string& to) {
  CommAction c;
  c.kind = CommKind::Receive;
  c.channel = std::move(ch);
  c.literal = std::move(literal);
  return add_transition(Transition{from, std::move(guard), std::move(c), to});
}

int ProgramGraph::location_index(const std::string& name) const {
  auto it = std::find(locations_.begin(), locations_.end(), name);
  return it == locations_.end() ? -1 : static_cast<int>(it - locations_.begin());
}

const VarDecl* ProgramGraph::find_var(const std::string& name) const {
  for (const auto& v : vars_)
    if (v.name == name) return &v;
  return nullptr;
}

void ProgramGraph::validate(const std::string& process) const {
  if (locations_.empty()) throw ModelError("process '" + process + "' has no locations");
  if (initial_.empty()) throw ModelError("process '" + process + "' has no initial location");
  std::set<std::string> seen;
  for (const auto& l : locations_)
    if (!seen.insert(l).second) throw ModelError("process '" + process + "': duplicate location '" + l + "'");
  for (const auto& l : initial_)
    if (location_index(l) < 0) throw ModelError("process '" + process + "': unknown initial location '" + l + "'");
  for (const auto& v : vars_) {
    if (!v.domain.contains(v.initial))
      throw ModelError("process '" + process + "': initial value " + format_value(v.initial) + " of '" + v.name +
                       "' is outside " + v.domain.to_string());
  }
  for (const auto& t : transitions_) {
    if (location_index(t.from) < 0 || location_index(t.to) < 0)
      throw ModelError("process '" + process + "': transition endpoint is not a location");
    if (t.is_comm()) {
      const auto& c = t.comm();
      if (c.kind == CommKind::Send && !c.payload)
        throw ModelError("process '" + process + "': send on " + to_string(c.channel) + " has no payload");
      if (c.kind == CommKind::Receive && c.var.empty() && !c.literal)
        throw ModelError("process '" + process + "': receive on " + to_string(c.channel) + " has no target");
    }
  }
}

namespace {
bool same_expr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return to_string(*a) == to_string(*b);
}
}  // namespace

bool operator==(const ProgramGraph& a, const ProgramGraph& b) {
  if (a.locations_ != b.locations_ || a.initial_ != b.initial_ || a.vars_.size() != b.vars_.size() ||
      a.transitions_.size() != b.transitions_.size() || !same_expr(a.g0_, b.g0_))
    return false;
  for (std::size_t i = 0; i < a.vars_.size(); ++i) {
    const auto& x = a.vars_[i];
    const auto& y = b.vars_[i];
    if (x.name != y.name || !(x.domain == y.domain) || !(x.initial == y.initial)) return false;
  }
  for (std::size_t i = 0; i < a.transitions_.size(); ++i) {
    const auto& x = a.transitions_[i];
    const auto& y = b.transitions_[i];
    if (x.from != y.from || x.to != y.to || !same_expr(x.guard, y.guard)) return false;
    if (label_to_string(x) != label_to_string(y)) return false;
  }
  return true;
}

std::string label_to_string(const Transition& t) {
  if (t.is_comm()) {
    const auto& c = t.comm();
    std::string head = (c.kind == CommKind::Send ? "!(" : "?(") + c.channel.source + ", " + c.channel.dest + ", ";
    if (c.kind == CommKind::Send) return head + to_string(*c.payload) + ")";
    if (c.literal) return head + format_message(*c.literal) + ")";
    return head + c.var + ")";
  }
  const auto& a = t.action();
  if (a.is_skip()) return "skip";
  std::string out;
  for (std::size_t i = 0; i < a.assignments.size(); ++i) {
    if (i > 0) out += ", ";
    out += a.assignments[i].var + " := " + to_string(*a.assignments[i].value);
  }
  if (a.native) {
    if (!out.empty()) out += ", ";
    out += "call " + a.native->name;
  }
  return out;
}

}  // namespace btrv
