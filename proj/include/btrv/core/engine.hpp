#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "btrv/core/channel_system.hpp"
#include "btrv/core/tss.hpp"

namespace btrv {

/// One executable step. For a handshake, `process`/`transition` is the
/// sender and `partner_*` the receiver; otherwise the partner fields are -1.
struct TransitionInstance {
  int process = -1;
  int transition = -1;
  int partner_process = -1;
  int partner_transition = -1;

  bool is_handshake() const { return partner_process >= 0; }
  friend bool operator==(const TransitionInstance&, const TransitionInstance&) = default;
  friend auto operator<=>(const TransitionInstance&, const TransitionInstance&) = default;
};

std::string describe(const ChannelSystem& cs, const TransitionInstance& t);

/// Every executable step from `cfg`, ordered by process then transition.
/// Observer processes never contribute instances.
std::vector<TransitionInstance> enabled_transitions(const ChannelSystem& cs, const Configuration& cfg);

bool is_enabled(const ChannelSystem& cs, const Configuration& cfg, const TransitionInstance& t);

/// What a step did, as far as traces and monitors are concerned.
struct StepEffect {
  bool transmission = false;  // a send on capacity 1 or a handshake
  int channel = -1;
  Message message;
  std::vector<int> monitors_violated;  // observers that entered their error location
};

/// Applies an enabled step in place. Observers watching a transmitted
/// channel co-transition in the same step and then run their internal
/// transitions to quiescence. Throws ContractError if `t` is not enabled.
StepEffect apply_step(const ChannelSystem& cs, Configuration& cfg, const TransitionInstance& t);

/// Functional form of apply_step.
Configuration step(const ChannelSystem& cs, const Configuration& cfg, const TransitionInstance& t);

/// Initial configuration with observers already settled.
Configuration start_configuration(const ChannelSystem& cs);

/// Asserts the capacity invariant on every buffer; throws ModelError.
void check_capacity_invariant(const ChannelSystem& cs, const Configuration& cfg);

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  /// Index into `enabled` (never empty).
  virtual std::size_t choose(const std::vector<TransitionInstance>& enabled, const Configuration& cfg) = 0;
};

/// Uniform choice driven by a 64-bit seed.
class RandomScheduler : public Scheduler {
 public:
  explicit RandomScheduler(std::uint64_t seed) : rng_(seed) {}
  std::size_t choose(const std::vector<TransitionInstance>& enabled, const Configuration& cfg) override;

 private:
  std::mt19937_64 rng_;
};

/// Cycles over processes, giving each enabled process a turn.
class RoundRobinScheduler : public Scheduler {
 public:
  std::size_t choose(const std::vector<TransitionInstance>& enabled, const Configuration& cfg) override;

 private:
  int last_ = -1;
};

/// Replays a recorded choice sequence; throws ContractError on divergence.
class ScriptedScheduler : public Scheduler {
 public:
  explicit ScriptedScheduler(std::vector<TransitionInstance> script) : script_(std::move(script)) {}
  std::size_t choose(const std::vector<TransitionInstance>& enabled, const Configuration& cfg) override;
  bool exhausted() const { return next_ >= script_.size(); }

 private:
  std::vector<TransitionInstance> script_;
  std::size_t next_ = 0;
};

enum class TerminalStatus { Horizon, Deadlock, Violation };
std::string_view to_string(TerminalStatus s);

struct RunOptions {
  std::uint64_t horizon = 1000;                 // engine steps
  std::optional<std::uint64_t> tick_horizon;    // stop once this many ticks were emitted
  bool stop_on_violation = false;
  std::optional<ChannelKey> tick_channel;       // transmissions here start a new tick
  bool check_invariants = true;
  /// Called right after each tick transmission with the new tick identifier.
  std::function<void(std::uint64_t tick, Configuration& cfg)> on_tick;
};

struct Transmission {
  std::uint64_t step = 0;
  int channel = -1;
  Message message;
  std::uint64_t tick = 0;

  friend bool operator==(const Transmission&, const Transmission&) = default;
};

struct ViolationRecord {
  std::string monitor;
  std::uint64_t tick = 0;
  std::uint64_t position = 0;  // TSS entry index
  ChannelKey channel;
  Message message;
};

struct ExecutionTrace {
  TimedStateSequence tss;
  std::vector<Transmission> transmissions;
  std::vector<TransitionInstance> choices;
  Configuration final_config;
  TerminalStatus status = TerminalStatus::Horizon;
  std::vector<std::string> blocked;  // "Process@location" on deadlock
  std::vector<ViolationRecord> violations;
  std::uint64_t steps = 0;
  std::uint64_t ticks = 0;
};

ExecutionTrace run(const ChannelSystem& cs, Scheduler& scheduler, const RunOptions& options);

}  // namespace btrv
