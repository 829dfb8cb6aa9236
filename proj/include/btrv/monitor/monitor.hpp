#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "btrv/core/channel_system.hpp"
#include "btrv/core/engine.hpp"
#include "btrv/core/errors.hpp"
#include "btrv/scope/ast.hpp"

namespace btrv::monitor {

/// A SCOPE formula outside the shapes monitors can be built for.
class NotMonitorable : public Error {
 public:
  using Error::Error;
};

/// Raised when a monitor refers to something the channel system lacks.
class AttachError : public Error {
 public:
  using Error::Error;
};

struct SafetySpec {
  ChannelKey channel;
  scope::CondPtr safe;  // the observed message is acceptable iff this holds
};

struct TriggerConjunct {
  ChannelKey channel;
  scope::CondPtr cond;
};

struct ResponseSpec {
  std::vector<TriggerConjunct> trigger;  // one entry per channel
  scope::Event response;
  std::int64_t theta = 1;  // the response must come strictly fewer than theta ticks later
  ChannelKey tick_channel;
};

struct MonitorSpec {
  enum class Pattern { Safety, Response };

  std::string name;
  Pattern pattern = Pattern::Safety;
  SafetySpec safety;
  ResponseSpec response;
};

struct CompileOptions {
  /// Channel whose transmissions are ticks; required for response shapes.
  std::optional<ChannelKey> tick_channel;
};

/// Matches `phi` against the supported shapes:
///
///   always E            E a boolean combination of events on one channel
///   always (T implies time_until (R) < theta)   (or <= theta)
///                       T a conjunction of events, R an event
///
/// Throws NotMonitorable naming the offending subformula otherwise.
MonitorSpec compile_from_scope(const std::string& name, const scope::Formula& phi, const CompileOptions& opts = {});

struct MonitorGraph {
  MonitorSpec spec;
  ProcessDef process;  // observer program graph; error location "Err"
};

/// Builds the monitor program graph. Safety monitors use locations I, Obs and
/// Err; response monitors use I, I1, C1, S, C2 and Err with a `timer`
/// variable counting down observed ticks.
MonitorGraph synthesize(const MonitorSpec& spec);

/// Wraps a hand-written observer process (e.g. from a monitor file).
MonitorGraph from_process(ProcessDef process);

/// Returns a new channel system with the monitors added as observers.
ChannelSystem attach(const ChannelSystem& cs, const std::vector<MonitorGraph>& monitors);

struct MonitorVerdict {
  enum class Status { Running, Violated };

  std::string monitor;
  Status status = Status::Running;
  std::uint64_t tick = 0;
  std::uint64_t position = 0;
  ChannelKey channel;
  Message message;
};

std::vector<MonitorVerdict> verdicts(const ExecutionTrace& trace, const std::vector<MonitorGraph>& monitors);

/// Throws ModelError if internal transitions of the monitor form a cycle,
/// i.e. some loop could run without observing a message.
void check_internal_acyclic(const ProcessDef& process);

/// Graphviz rendering of a monitor (or any process).
std::string to_dot(const ProcessDef& process);

}  // namespace btrv::monitor
