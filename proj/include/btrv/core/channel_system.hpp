#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "btrv/core/program_graph.hpp"

namespace btrv {

/// Execution state: one location per process, the variable store, and the
/// buffer of every channel (always empty for capacity 0).
struct Configuration {
  std::vector<int> locations;
  std::vector<Value> vars;
  std::vector<std::optional<Message>> buffers;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

enum class TransitionKind { Internal, Send, Receive };

struct CompiledTransition {
  int from = 0;
  int to = 0;
  ExprPtr guard;  // bound; null means true
  TransitionKind kind = TransitionKind::Internal;
  int channel = -1;
  ExprPtr payload;  // send
  int recv_slot = -1;
  std::optional<Message> literal;
  std::vector<std::pair<int, ExprPtr>> assignments;
  std::shared_ptr<const NativeEffect> native;
  std::string label;  // text form, for diagnostics
};

struct CompiledProcess {
  std::string name;
  bool observer = false;
  int error_location = -1;
  int initial_location = 0;
  std::vector<std::string> locations;
  std::vector<CompiledTransition> transitions;
  std::vector<std::vector<int>> outgoing;  // by location
  std::unordered_map<std::string, int> slots;  // visible variable name -> store slot
};

struct ChannelInfo {
  ChannelKey key;
  int source = -1;
  int dest = -1;
  int capacity = 1;
};

/// Validated, immutable channel system CS = [PG1 | ... | PGn].
///
/// Variables live in one flat store: shared variables first, then each
/// process's locals (qualified as Process.var). Observer processes (runtime
/// monitors) may receive on any channel; they never take part in scheduling
/// and move only through observations and their internal transitions.
class ChannelSystem {
 public:
  explicit ChannelSystem(SystemDef def);

  const SystemDef& def() const { return def_; }
  const std::string& name() const { return def_.name; }
  const std::vector<CompiledProcess>& processes() const { return processes_; }
  const std::vector<ChannelInfo>& channels() const { return channels_; }
  const std::vector<std::string>& var_names() const { return var_names_; }
  const std::vector<Domain>& var_domains() const { return var_domains_; }

  int process_index(const std::string& name) const;
  int channel_index(const ChannelKey& key) const;
  int channel_index(const std::string& source, const std::string& dest) const {
    return channel_index(ChannelKey{source, dest});
  }
  /// Store slot of a process-local (or shared) variable; -1 when unknown.
  int var_slot(const std::string& process, const std::string& var) const;
  std::vector<ChannelKey> channel_keys() const;

  /// Observer process indices watching `channel`, in process order.
  const std::vector<int>& observers_of(int channel) const { return observers_by_channel_[channel]; }
  bool has_observers() const { return has_observers_; }

  Configuration initial_configuration() const;

  /// Throws ModelError if `cfg` has the wrong shape or an unknown location.
  void check_configuration(const Configuration& cfg) const;

  /// Assigns `v` to `slot`, enforcing the declared domain.
  void assign(Configuration& cfg, int slot, Value v) const;

 private:
  SystemDef def_;
  std::vector<CompiledProcess> processes_;
  std::vector<ChannelInfo> channels_;
  std::vector<std::string> var_names_;
  std::vector<Domain> var_domains_;
  std::vector<Value> initial_values_;
  std::map<ChannelKey, int> channel_lookup_;
  std::unordered_map<std::string, int> process_lookup_;
  std::vector<std::vector<int>> observers_by_channel_;
  bool has_observers_ = false;
};

/// Location name of `process` in `cfg`.
const std::string& location_of(const ChannelSystem& cs, const Configuration& cfg, int process);

}  // namespace btrv
