#include "btrv/core/engine.hpp"

#include "btrv/core/errors.hpp"

namespace btrv {

namespace {

constexpr int kSettleLimit = 10000;

bool guard_holds(const CompiledTransition& t, const Configuration& cfg) {
  return !t.guard || holds(*t.guard, cfg.vars);
}

Message payload_of(const CompiledTransition& t, const Configuration& cfg) {
  auto v = eval(*t.payload, cfg.vars);
  if (!v) throw EvalError("send payload '" + t.label + "' is undefined");
  if (auto* m = std::get_if<Message>(&*v)) return std::move(*m);
  throw EvalError("send payload of '" + t.label + "' is not a message: " + format_value(*v));
}

bool accepts(const CompiledTransition& recv, const Message& m) { return !recv.literal || *recv.literal == m; }

class StoreAccess : public VarAccess {
 public:
  StoreAccess(const ChannelSystem& cs, Configuration& cfg, const CompiledProcess& p) : cs_(cs), cfg_(cfg), p_(p) {}

  const Value& get(const std::string& name) const override { return cfg_.vars[slot(name)]; }
  void set(const std::string& name, Value v) override { cs_.assign(cfg_, slot(name), std::move(v)); }

 private:
  int slot(const std::string& name) const {
    auto it = p_.slots.find(name);
    if (it == p_.slots.end()) throw EvalError("process '" + p_.name + "' has no variable '" + name + "'");
    return it->second;
  }
  const ChannelSystem& cs_;
  Configuration& cfg_;
  const CompiledProcess& p_;
};

void apply_action(const ChannelSystem& cs, Configuration& cfg, const CompiledProcess& p, const CompiledTransition& t) {
  if (t.assignments.size() == 1) {
    auto v = eval(*t.assignments[0].second, cfg.vars);
    if (!v) throw EvalError("assignment in '" + t.label + "' of process '" + p.name + "' is undefined");
    cs.assign(cfg, t.assignments[0].first, std::move(*v));
  } else if (!t.assignments.empty()) {
    std::vector<Value> values;
    values.reserve(t.assignments.size());
    for (const auto& [slot, e] : t.assignments) {
      auto v = eval(*e, cfg.vars);
      if (!v) throw EvalError("assignment in '" + t.label + "' of process '" + p.name + "' is undefined");
      values.push_back(std::move(*v));
    }
    for (std::size_t i = 0; i < values.size(); ++i) cs.assign(cfg, t.assignments[i].first, std::move(values[i]));
  }
  if (t.native) {
    StoreAccess access(cs, cfg, p);
    t.native->fn(access);
  }
}

// Runs an observer's internal transitions until none is enabled. Returns
// true if the observer ends in its error location.
bool settle(const ChannelSystem& cs, Configuration& cfg, int pi) {
  const auto& p = cs.processes()[pi];
  for (int iter = 0;; ++iter) {
    if (iter > kSettleLimit) throw ModelError("monitor '" + p.name + "' does not settle (internal cycle)");
    int loc = cfg.locations[pi];
    if (loc == p.error_location) return true;
    const CompiledTransition* fired = nullptr;
    for (int ti : p.outgoing[loc]) {
      const auto& t = p.transitions[ti];
      if (t.kind == TransitionKind::Internal && guard_holds(t, cfg)) {
        fired = &t;
        break;
      }
    }
    if (fired == nullptr) return false;
    apply_action(cs, cfg, p, *fired);
    cfg.locations[pi] = fired->to;
  }
}

void observe(const ChannelSystem& cs, Configuration& cfg, int channel, const Message& m, StepEffect& eff) {
  for (int oi : cs.observers_of(channel)) {
    const auto& p = cs.processes()[oi];
    int loc = cfg.locations[oi];
    if (loc == p.error_location) continue;
    for (int ti : p.outgoing[loc]) {
      const auto& t = p.transitions[ti];
      if (t.kind != TransitionKind::Receive || t.channel != channel || !accepts(t, m) || !guard_holds(t, cfg))
        continue;
      if (t.recv_slot >= 0) cs.assign(cfg, t.recv_slot, Value(m));
      cfg.locations[oi] = t.to;
      if (settle(cs, cfg, oi)) eff.monitors_violated.push_back(oi);
      break;
    }
  }
}

}  // namespace

std::string describe(const ChannelSystem& cs, const TransitionInstance& t) {
  if (t.process < 0 || static_cast<std::size_t>(t.process) >= cs.processes().size()) return "<invalid>";
  const auto& p = cs.processes()[t.process];
  if (t.transition < 0 || static_cast<std::size_t>(t.transition) >= p.transitions.size()) return p.name + ":<invalid>";
  const auto& tr = p.transitions[t.transition];
  std::string out = p.name + ": " + p.locations[tr.from] + " --[" + tr.label + "]--> " + p.locations[tr.to];
  if (t.is_handshake()) out += " with " + cs.processes()[t.partner_process].name;
  return out;
}

std::vector<TransitionInstance> enabled_transitions(const ChannelSystem& cs, const Configuration& cfg) {
  std::vector<TransitionInstance> out;
  const auto& procs = cs.processes();
  for (std::size_t pi = 0; pi < procs.size(); ++pi) {
    const auto& p = procs[pi];
    if (p.observer) continue;
    int loc = cfg.locations[pi];
    if (loc < 0 || static_cast<std::size_t>(loc) >= p.locations.size())
      throw ModelError("process '" + p.name + "' is at an unknown location");
    for (int ti : p.outgoing[loc]) {
      const auto& t = p.transitions[ti];
      switch (t.kind) {
        case TransitionKind::Internal:
          if (guard_holds(t, cfg)) out.push_back({static_cast<int>(pi), ti, -1, -1});
          break;
        case TransitionKind::Send: {
          const auto& ch = cs.channels()[t.channel];
          if (ch.capacity == 1) {
            if (!cfg.buffers[t.channel] && guard_holds(t, cfg)) out.push_back({static_cast<int>(pi), ti, -1, -1});
            break;
          }
          if (!guard_holds(t, cfg)) break;
          const auto& q = procs[ch.dest];
          int qloc = cfg.locations[ch.dest];
          std::optional<Message> m;
          for (int ri : q.outgoing[qloc]) {
            const auto& r = q.transitions[ri];
            if (r.kind != TransitionKind::Receive || r.channel != t.channel || !guard_holds(r, cfg)) continue;
            if (r.literal) {
              if (!m) m = payload_of(t, cfg);
              if (!(*r.literal == *m)) continue;
            }
            out.push_back({static_cast<int>(pi), ti, ch.dest, ri});
          }
          break;
        }
        case TransitionKind::Receive: {
          const auto& ch = cs.channels()[t.channel];
          if (ch.capacity == 0) break;  // handshakes are enumerated from the sender
          const auto& buf = cfg.buffers[t.channel];
          if (buf && accepts(t, *buf) && guard_holds(t, cfg)) out.push_back({static_cast<int>(pi), ti, -1, -1});
          break;
        }
      }
    }
  }
  return out;
}

bool is_enabled(const ChannelSystem& cs, const Configuration& cfg, const TransitionInstance& inst) {
  const auto& procs = cs.processes();
  if (inst.process < 0 || static_cast<std::size_t>(inst.process) >= procs.size()) return false;
  const auto& p = procs[inst.process];
  if (p.observer) return false;
  if (inst.transition < 0 || static_cast<std::size_t>(inst.transition) >= p.transitions.size()) return false;
  const auto& t = p.transitions[inst.transition];
  if (cfg.locations[inst.process] != t.from || !guard_holds(t, cfg)) return false;
  switch (t.kind) {
    case TransitionKind::Internal:
      return !inst.is_handshake();
    case TransitionKind::Receive: {
      const auto& ch = cs.channels()[t.channel];
      return !inst.is_handshake() && ch.capacity == 1 && cfg.buffers[t.channel] && accepts(t, *cfg.buffers[t.channel]);
    }
    case TransitionKind::Send: {
      const auto& ch = cs.channels()[t.channel];
      if (ch.capacity == 1) return !inst.is_handshake() && !cfg.buffers[t.channel];
      if (inst.partner_process != ch.dest) return false;
      const auto& q = procs[inst.partner_process];
      if (inst.partner_transition < 0 || static_cast<std::size_t>(inst.partner_transition) >= q.transitions.size())
        return false;
      const auto& r = q.transitions[inst.partner_transition];
      if (r.kind != TransitionKind::Receive || r.channel != t.channel || cfg.locations[inst.partner_process] != r.from ||
          !guard_holds(r, cfg))
        return false;
      return accepts(r, payload_of(t, cfg));
    }
  }
  return false;
}

StepEffect apply_step(const ChannelSystem& cs, Configuration& cfg, const TransitionInstance& inst) {
  if (!is_enabled(cs, cfg, inst)) throw ContractError("transition is not enabled: " + describe(cs, inst));
  StepEffect eff;
  const auto& p = cs.processes()[inst.process];
  const auto& t = p.transitions[inst.transition];
  switch (t.kind) {
    case TransitionKind::Internal:
      apply_action(cs, cfg, p, t);
      cfg.locations[inst.process] = t.to;
      break;
    case TransitionKind::Receive: {
      Message m = std::move(*cfg.buffers[t.channel]);
      cfg.buffers[t.channel].reset();
      if (t.recv_slot >= 0) cs.assign(cfg, t.recv_slot, Value(std::move(m)));
      cfg.locations[inst.process] = t.to;
      break;
    }
    case TransitionKind::Send: {
      Message m = payload_of(t, cfg);
      eff.transmission = true;
      eff.channel = t.channel;
      eff.message = m;
      if (inst.is_handshake()) {
        const auto& r = cs.processes()[inst.partner_process].transitions[inst.partner_transition];
        cfg.locations[inst.process] = t.to;
        cfg.locations[inst.partner_process] = r.to;
        if (r.recv_slot >= 0) cs.assign(cfg, r.recv_slot, Value(std::move(m)));
      } else {
        cfg.buffers[t.channel] = std::move(m);
        cfg.locations[inst.process] = t.to;
      }
      if (cs.has_observers()) observe(cs, cfg, eff.channel, eff.message, eff);
      break;
    }
  }
  return eff;
}

Configuration step(const ChannelSystem& cs, const Configuration& cfg, const TransitionInstance& t) {
  Configuration next = cfg;
  apply_step(cs, next, t);
  return next;
}

Configuration start_configuration(const ChannelSystem& cs) {
  Configuration cfg = cs.initial_configuration();
  for (std::size_t pi = 0; pi < cs.processes().size(); ++pi)
    if (cs.processes()[pi].observer) settle(cs, cfg, static_cast<int>(pi));
  return cfg;
}

void check_capacity_invariant(const ChannelSystem& cs, const Configuration& cfg) {
  for (std::size_t c = 0; c < cs.channels().size(); ++c)
    if (cs.channels()[c].capacity == 0 && cfg.buffers[c])
      throw ModelError("capacity-0 channel " + to_string(cs.channels()[c].key) + " buffers a message");
}

std::size_t RandomScheduler::choose(const std::vector<TransitionInstance>& enabled, const Configuration&) {
  std::uniform_int_distribution<std::size_t> dist(0, enabled.size() - 1);
  return dist(rng_);
}

std::size_t RoundRobinScheduler::choose(const std::vector<TransitionInstance>& enabled, const Configuration&) {
  for (std::size_t i = 0; i < enabled.size(); ++i) {
    if (enabled[i].process > last_) {
      last_ = enabled[i].process;
      return i;
    }
  }
  last_ = enabled.front().process;
  return 0;
}

std::size_t ScriptedScheduler::choose(const std::vector<TransitionInstance>& enabled, const Configuration&) {
  if (next_ >= script_.size()) throw ContractError("scripted schedule exhausted");
  const auto& want = script_[next_++];
  for (std::size_t i = 0; i < enabled.size(); ++i)
    if (enabled[i] == want) return i;
  throw ContractError("scripted choice " + std::to_string(next_ - 1) + " is not enabled");
}

std::string_view to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::Horizon: return "horizon";
    case TerminalStatus::Deadlock: return "deadlock";
    case TerminalStatus::Violation: return "violation-stop";
  }
  return "?";
}

ExecutionTrace run(const ChannelSystem& cs, Scheduler& scheduler, const RunOptions& options) {
  ExecutionTrace trace;
  trace.tss.channels = cs.channel_keys();
  trace.tss.open_ended = true;

  int tick_channel = -1;
  if (options.tick_channel) {
    tick_channel = cs.channel_index(*options.tick_channel);
    if (tick_channel < 0) throw ModelError("tick channel " + to_string(*options.tick_channel) + " is not declared");
  }

  Configuration cfg = start_configuration(cs);
  std::vector<std::optional<Message>> latched(cs.channels().size());
  std::uint64_t current_tick = 0;

  while (trace.steps < options.horizon) {
    if (options.tick_horizon && trace.ticks >= *options.tick_horizon) break;
    auto enabled = enabled_transitions(cs, cfg);
    if (enabled.empty()) {
      trace.status = TerminalStatus::Deadlock;
      for (std::size_t pi = 0; pi < cs.processes().size(); ++pi)
        if (!cs.processes()[pi].observer)
          trace.blocked.push_back(cs.processes()[pi].name + "@" + location_of(cs, cfg, static_cast<int>(pi)));
      break;
    }
    std::size_t k = scheduler.choose(enabled, cfg);
    if (k >= enabled.size()) throw ContractError("scheduler chose an out-of-range index");
    const TransitionInstance chosen = enabled[k];
    trace.choices.push_back(chosen);
    StepEffect eff = apply_step(cs, cfg, chosen);
    ++trace.steps;

    if (eff.transmission) {
      bool is_tick = eff.channel == tick_channel;
      if (is_tick) {
        current_tick = trace.ticks++;
        for (auto& l : latched) l.reset();
      }
      latched[eff.channel] = eff.message;
      trace.tss.entries.push_back(TssEntry{current_tick, latched});
      trace.transmissions.push_back(Transmission{trace.steps - 1, eff.channel, eff.message, current_tick});
      for (int m : eff.monitors_violated)
        trace.violations.push_back(ViolationRecord{cs.processes()[m].name, current_tick, trace.tss.size() - 1,
                                                   cs.channels()[eff.channel].key, eff.message});
      if (is_tick && options.on_tick) options.on_tick(current_tick, cfg);
    }
    if (options.check_invariants) check_capacity_invariant(cs, cfg);
    if (options.stop_on_violation && !trace.violations.empty()) {
      trace.status = TerminalStatus::Violation;
      break;
    }
  }
  trace.final_config = std::move(cfg);
  return trace;
}

}  // namespace btrv
