#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "btrv/core/program_graph.hpp"

namespace btrv::bt {

enum class Status { Success, Failure, Running };

std::string_view to_string(Status s);
std::optional<Status> parse_status(std::string_view s);
/// [<success>], [<failure>] or [<running>].
Message status_message(Status s);

// Control messages exchanged between node processes.
Message tick_message();    // [<tick>]
Message halt_message();    // [<halt>]
Message halted_message();  // [<halted>], acknowledges a halt

enum class NodeKind { Sequence, Fallback, Condition, Action };

std::string_view to_string(NodeKind k);

struct ReplyRule {
  Message reply;
  Status status = Status::Failure;

  friend bool operator==(const ReplyRule&, const ReplyRule&) = default;
};

/// How a leaf talks to its skill. A reply matching no rule makes the leaf
/// fail and bumps its `bad_replies` counter.
struct SkillBinding {
  std::string skill;                    // process name of the skill
  Message request = tick_message();     // sent on every tick
  std::optional<Message> halt_request;  // actions only
  std::vector<ReplyRule> replies;       // empty: the three status messages

  friend bool operator==(const SkillBinding&, const SkillBinding&) = default;
};

struct NodeDef {
  NodeKind kind = NodeKind::Condition;
  std::string name;
  std::vector<NodeDef> children;
  std::optional<SkillBinding> skill;

  bool is_leaf() const { return kind == NodeKind::Condition || kind == NodeKind::Action; }
  friend bool operator==(const NodeDef&, const NodeDef&) = default;
};

struct BehaviorTreeDef {
  std::string name = "tree";
  NodeDef root;
  std::string tick_source = "TickGenerator";
  std::string process_prefix = "BT_";

  friend bool operator==(const BehaviorTreeDef&, const BehaviorTreeDef&) = default;
};

NodeDef sequence(std::string name, std::vector<NodeDef> children);
NodeDef fallback(std::string name, std::vector<NodeDef> children);
NodeDef condition(std::string name, SkillBinding skill);
NodeDef action(std::string name, SkillBinding skill);

/// Throws ModelError on: composites without children, leaves with children
/// or without a skill, duplicate node names, halt requests on conditions.
void validate(const BehaviorTreeDef& def);

struct CompiledTree {
  std::vector<ProcessDef> processes;  // one per node, preorder
  std::vector<ChannelDecl> channels;
  std::map<std::string, std::string> node_process;  // node name -> process name
  std::string root_process;
  ChannelKey tick_channel;    // tick source -> root, capacity 0
  ChannelKey status_channel;  // root -> tick source, capacity 0
};

/// One process per node. Parent/child exchanges and the root's tick
/// channel have capacity 0; each leaf gets a capacity-1 request/reply pair
/// with its skill. Every node is idle until ticked, then answers its parent
/// with a status; halts are acknowledged with [<halted>] once propagated.
CompiledTree compile_bt(const BehaviorTreeDef& def);

/// Text format:
///
///     tree Mission
///     fallback Root {
///       sequence Go {
///         condition BatteryLevelAbove30 -> BatteryLevel
///         action GoToDestination -> GoToDestination halt [<halt>]
///       }
///     }
///
/// A leaf may add `request MSG`, `halt MSG` and any number of
/// `on MSG STATUS` rules.
BehaviorTreeDef parse_tree(std::string_view text);
BehaviorTreeDef load_tree(const std::string& path);
std::string to_text(const BehaviorTreeDef& def);

/// Indented rendering: → sequence, ? fallback, (name) condition, [name]
/// action, with the skill shown when it differs from the leaf name.
std::string pretty(const BehaviorTreeDef& def);

std::size_t node_count(const NodeDef& n);

}  // namespace btrv::bt
