#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "btrv/core/expr.hpp"
#include "btrv/core/value.hpp"

namespace btrv {

/// Endpoint names of a directed channel (source, dest).
struct ChannelKey {
  std::string source;
  std::string dest;

  friend bool operator==(const ChannelKey&, const ChannelKey&) = default;
  friend auto operator<=>(const ChannelKey&, const ChannelKey&) = default;
};

std::string to_string(const ChannelKey& key);

struct VarDecl {
  std::string name;
  Domain domain;
  Value initial;
};

/// Mutable view of the variables a native effect may touch.
class VarAccess {
 public:
  virtual ~VarAccess() = default;
  virtual const Value& get(const std::string& name) const = 0;
  virtual void set(const std::string& name, Value v) = 0;

  std::int64_t get_int(const std::string& name) const;
  bool get_bool(const std::string& name) const;
  Symbol get_symbol(const std::string& name) const;
  const Message& get_message(const std::string& name) const;
};

/// A C++ function run as part of an internal action, after its assignments.
struct NativeEffect {
  std::string name;
  std::function<void(VarAccess&)> fn;
};

struct Assignment {
  std::string var;
  ExprPtr value;
};

/// Internal action: simultaneous assignments, then an optional native effect.
struct Action {
  std::vector<Assignment> assignments;
  std::shared_ptr<const NativeEffect> native;

  bool is_skip() const { return assignments.empty() && !native; }
};

enum class CommKind { Send, Receive };

/// !(p,q,e) sends the value of e; ?(q,p,x) receives into x; ?(q,p,<m>)
/// accepts only a message equal to <m>.
struct CommAction {
  CommKind kind = CommKind::Send;
  ChannelKey channel;
  ExprPtr payload;                 // send only
  std::string var;                 // receive into variable
  std::optional<Message> literal;  // receive matching a literal
};

struct Transition {
  std::string from;
  ExprPtr guard;  // null means true
  std::variant<Action, CommAction> label;
  std::string to;

  bool is_comm() const { return std::holds_alternative<CommAction>(label); }
  const CommAction& comm() const { return std::get<CommAction>(label); }
  const Action& action() const { return std::get<Action>(label); }
};

/// Program graph (Loc, Act, Effect, transitions, Loc0, g0) of one process.
///
/// The first initial location is where execution starts; the initial
/// condition g0 must hold on the declared initial values.
class ProgramGraph {
 public:
  ProgramGraph& add_location(const std::string& name);
  ProgramGraph& add_var(VarDecl decl);
  ProgramGraph& add_initial(const std::string& location);
  ProgramGraph& set_initial_condition(ExprPtr g0);
  ProgramGraph& add_transition(Transition t);

  // Convenience builders.
  ProgramGraph& internal(const std::string& from, ExprPtr guard, std::vector<Assignment> assigns,
                         const std::string& to, std::shared_ptr<const NativeEffect> native = nullptr);
  ProgramGraph& send(const std::string& from, ExprPtr guard, ChannelKey ch, ExprPtr payload, const std::string& to);
  ProgramGraph& receive(const std::string& from, ExprPtr guard, ChannelKey ch, std::string var, const std::string& to);
  ProgramGraph& receive_literal(const std::string& from, ExprPtr guard, ChannelKey ch, Message literal,
                                const std::string& to);

  const std::vector<std::string>& locations() const { return locations_; }
  const std::vector<VarDecl>& vars() const { return vars_; }
  const std::vector<std::string>& initial_locations() const { return initial_; }
  const ExprPtr& initial_condition() const { return g0_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  int location_index(const std::string& name) const;
  const VarDecl* find_var(const std::string& name) const;

  /// Structural checks: endpoints declared, unique names, initial values in
  /// their domains. Throws ModelError naming the offending element.
  void validate(const std::string& process_name) const;

  friend bool operator==(const ProgramGraph& a, const ProgramGraph& b);

 private:
  std::vector<std::string> locations_;
  std::vector<VarDecl> vars_;
  std::vector<std::string> initial_;
  ExprPtr g0_;
  std::vector<Transition> transitions_;
};

struct ProcessDef {
  std::string name;
  ProgramGraph graph;
  bool observer = false;     // monitors: never scheduled, move only with observations
  std::string error_location;  // observers only; absorbing
};

struct ChannelDecl {
  ChannelKey key;
  int capacity = 1;
};

/// Declarative description of a channel system, before validation.
struct SystemDef {
  std::string name = "system";
  std::vector<ProcessDef> processes;
  std::vector<ChannelDecl> channels;
  std::vector<VarDecl> shared;
};

/// Renders a transition label in text-format syntax.
std::string label_to_string(const Transition& t);

}  // namespace btrv
