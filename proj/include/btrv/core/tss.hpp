#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "btrv/core/program_graph.hpp"
#include "btrv/core/value.hpp"

namespace btrv {

/// One TSS entry (sigma_i, tau_i): the channel evaluation and tick identifier.
///
/// A channel's entry holds the message most recently transmitted on it during
/// the current tick, or nothing if it carried no message since that tick began.
struct TssEntry {
  std::uint64_t tick = 0;
  std::vector<std::optional<Message>> state;

  friend bool operator==(const TssEntry&, const TssEntry&) = default;
};

/// Timed state sequence over a fixed channel list.
///
/// `open_ended` marks a finite prefix of a longer (progressive) execution; a
/// closed sequence is judged as if nothing follows its last entry.
struct TimedStateSequence {
  std::vector<ChannelKey> channels;
  std::vector<TssEntry> entries;
  bool open_ended = true;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  int channel_index(const ChannelKey& key) const;

  /// Checks tau_0 = 0, monotone ticks and entry widths; throws Error.
  void validate() const;

  TimedStateSequence prefix(std::size_t n) const;

  friend bool operator==(const TimedStateSequence&, const TimedStateSequence&) = default;
};

}  // namespace btrv
