#include "btrv/core/channel_system.hpp"

#include <set>

#include "btrv/core/errors.hpp"

namespace btrv {

ChannelSystem::ChannelSystem(SystemDef def) : def_(std::move(def)) {
  // Processes and shared variables.
  for (const auto& v : def_.shared) {
    if (!v.domain.contains(v.initial))
      throw ModelError("shared variable '" + v.name + "': initial value outside " + v.domain.to_string());
    for (const auto& n : var_names_)
      if (n == v.name) throw ModelError("duplicate shared variable '" + v.name + "'");
    var_names_.push_back(v.name);
    var_domains_.push_back(v.domain);
    initial_values_.push_back(v.initial);
  }
  for (std::size_t p = 0; p < def_.processes.size(); ++p) {
    const auto& pd = def_.processes[p];
    if (pd.name.empty()) throw ModelError("process with empty name");
    if (!process_lookup_.emplace(pd.name, static_cast<int>(p)).second)
      throw ModelError("duplicate process '" + pd.name + "'");
    pd.graph.validate(pd.name);
  }

  // Channels.
  for (const auto& c : def_.channels) {
    if (c.key.source == c.key.dest) throw ModelError("channel " + to_string(c.key) + " connects a process to itself");
    int s = process_index(c.key.source);
    int d = process_index(c.key.dest);
    if (s < 0 || d < 0) throw ModelError("channel " + to_string(c.key) + " names an undeclared process");
    if (def_.processes[s].observer || def_.processes[d].observer)
      throw ModelError("channel " + to_string(c.key) + " has a monitor endpoint");
    if (c.capacity != 0 && c.capacity != 1)
      throw ModelError("channel " + to_string(c.key) + " has capacity " + std::to_string(c.capacity) +
                       "; only 0 and 1 are supported");
    if (!channel_lookup_.emplace(c.key, static_cast<int>(channels_.size())).second)
      throw ModelError("duplicate channel " + to_string(c.key));
    channels_.push_back(ChannelInfo{c.key, s, d, c.capacity});
  }
  observers_by_channel_.assign(channels_.size(), {});

  // Compile processes.
  for (std::size_t p = 0; p < def_.processes.size(); ++p) {
    const auto& pd = def_.processes[p];
    const auto& g = pd.graph;
    CompiledProcess cp;
    cp.name = pd.name;
    cp.observer = pd.observer;
    cp.locations = g.locations();
    cp.initial_location = g.location_index(g.initial_locations().front());
    cp.outgoing.assign(cp.locations.size(), {});
    for (std::size_t i = 0; i < def_.shared.size(); ++i) cp.slots[def_.shared[i].name] = static_cast<int>(i);
    for (const auto& v : g.vars()) {
      int slot = static_cast<int>(var_names_.size());
      var_names_.push_back(pd.name + "." + v.name);
      var_domains_.push_back(v.domain);
      initial_values_.push_back(v.initial);
      cp.slots[v.name] = slot;
    }
    auto resolve = [&cp](const std::string& n) {
      auto it = cp.slots.find(n);
      return it == cp.slots.end() ? -1 : it->second;
    };
    auto bind_in = [&](const ExprPtr& e, const std::string& where) -> ExprPtr {
      if (!e) return nullptr;
      try {
        return bind_expr(e, resolve);
      } catch (const ModelError& err) {
        throw ModelError("process '" + pd.name + "', " + where + ": " + err.what());
      }
    };

    if (pd.observer) {
      cp.error_location = g.location_index(pd.error_location);
      if (cp.error_location < 0)
        throw ModelError("monitor '" + pd.name + "' has no error location '" + pd.error_location + "'");
    }

    std::set<int> watched;
    for (const auto& t : g.transitions()) {
      CompiledTransition ct;
      ct.from = g.location_index(t.from);
      ct.to = g.location_index(t.to);
      std::string where = t.from + " --> " + t.to;
      ct.guard = bind_in(t.guard, where);
      ct.label = label_to_string(t);
      if (t.is_comm()) {
        const auto& c = t.comm();
        ct.channel = channel_index(c.channel);
        if (ct.channel < 0)
          throw ModelError("process '" + pd.name + "' uses undeclared channel " + to_string(c.channel));
        if (c.kind == CommKind::Send) {
          if (pd.observer) throw ModelError("monitor '" + pd.name + "' may not send");
          if (c.channel.source != pd.name)
            throw ModelError("process '" + pd.name + "' sends on " + to_string(c.channel) + " which it does not own");
          ct.kind = TransitionKind::Send;
          ct.payload = bind_in(c.payload, where);
        } else {
          if (!pd.observer && c.channel.dest != pd.name)
            throw ModelError("process '" + pd.name + "' receives on " + to_string(c.channel) +
                             " whose destination is another process");
          ct.kind = TransitionKind::Receive;
          ct.literal = c.literal;
          if (!c.var.empty()) {
            ct.recv_slot = resolve(c.var);
            if (ct.recv_slot < 0)
              throw ModelError("process '" + pd.name + "' receives into unknown variable '" + c.var + "'");
            if (var_domains_[ct.recv_slot].kind() != Domain::Kind::Message)
              throw ModelError("process '" + pd.name + "': receive target '" + c.var + "' must have domain msg");
          }
          if (pd.observer) watched.insert(ct.channel);
        }
      } else {
        const auto& a = t.action();
        std::set<std::string> targets;
        for (const auto& as : a.assignments) {
          if (!targets.insert(as.var).second)
            throw ModelError("process '" + pd.name + "' assigns '" + as.var + "' twice in one action");
          int slot = resolve(as.var);
          if (slot < 0) throw ModelError("process '" + pd.name + "' assigns unknown variable '" + as.var + "'");
          ct.assignments.emplace_back(slot, bind_in(as.value, where));
        }
        ct.native = a.native;
      }
      if (pd.observer && ct.from == cp.error_location)
        throw ModelError("monitor '" + pd.name + "': error location must be absorbing");
      cp.outgoing[ct.from].push_back(static_cast<int>(cp.transitions.size()));
      cp.transitions.push_back(std::move(ct));
    }
    for (int ch : watched) {
      observers_by_channel_[ch].push_back(static_cast<int>(p));
      has_observers_ = true;
    }
    processes_.push_back(std::move(cp));
  }

  // Initial conditions.
  for (std::size_t p = 0; p < def_.processes.size(); ++p) {
    const auto& g0 = def_.processes[p].graph.initial_condition();
    if (!g0) continue;
    auto& cp = processes_[p];
    auto bound = bind_expr(g0, [&cp](const std::string& n) {
      auto it = cp.slots.find(n);
      return it == cp.slots.end() ? -1 : it->second;
    });
    if (!holds(*bound, initial_values_))
      throw ModelError("process '" + cp.name + "': initial condition '" + to_string(*g0) +
                       "' does not hold for the initial values");
  }
}

int ChannelSystem::process_index(const std::string& name) const {
  auto it = process_lookup_.find(name);
  return it == process_lookup_.end() ? -1 : it->second;
}

int ChannelSystem::channel_index(const ChannelKey& key) const {
  auto it = channel_lookup_.find(key);
  return it == channel_lookup_.end() ? -1 : it->second;
}

int ChannelSystem::var_slot(const std::string& process, const std::string& var) const {
  int p = process_index(process);
  if (p < 0) return -1;
  auto it = processes_[p].slots.find(var);
  return it == processes_[p].slots.end() ? -1 : it->second;
}

std::vector<ChannelKey> ChannelSystem::channel_keys() const {
  std::vector<ChannelKey> out;
  out.reserve(channels_.size());
  for (const auto& c : channels_) out.push_back(c.key);
  return out;
}

Configuration ChannelSystem::initial_configuration() const {
  Configuration cfg;
  cfg.locations.reserve(processes_.size());
  for (const auto& p : processes_) cfg.locations.push_back(p.initial_location);
  cfg.vars = initial_values_;
  cfg.buffers.assign(channels_.size(), std::nullopt);
  return cfg;
}

void ChannelSystem::check_configuration(const Configuration& cfg) const {
  if (cfg.locations.size() != processes_.size() || cfg.vars.size() != var_names_.size() ||
      cfg.buffers.size() != channels_.size())
    throw ModelError("configuration does not match the channel system");
  for (std::size_t p = 0; p < processes_.size(); ++p) {
    int l = cfg.locations[p];
    if (l < 0 || static_cast<std::size_t>(l) >= processes_[p].locations.size())
      throw ModelError("process '" + processes_[p].name + "' is at an unknown location");
  }
  for (std::size_t c = 0; c < channels_.size(); ++c)
    if (channels_[c].capacity == 0 && cfg.buffers[c])
      throw ModelError("capacity-0 channel " + to_string(channels_[c].key) + " holds a message");
}

void ChannelSystem::assign(Configuration& cfg, int slot, Value v) const {
  if (!var_domains_[slot].contains(v))
    throw EvalError("value " + format_value(v) + " is outside the domain " + var_domains_[slot].to_string() + " of '" +
                    var_names_[slot] + "'");
  cfg.vars[slot] = std::move(v);
}

const std::string& location_of(const ChannelSystem& cs, const Configuration& cfg, int process) {
  return cs.processes()[process].locations[cfg.locations[process]];
}

}  // namespace btrv
