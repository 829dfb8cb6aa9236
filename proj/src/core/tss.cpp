#include "btrv/core/tss.hpp"

#include "btrv/core/errors.hpp"

namespace btrv {

int TimedStateSequence::channel_index(const ChannelKey& key) const {
  for (std::size_t i = 0; i < channels.size(); ++i)
    if (channels[i] == key) return static_cast<int>(i);
  return -1;
}

void TimedStateSequence::validate() const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].state.size() != channels.size())
      throw Error("entry " + std::to_string(i) + " has " + std::to_string(entries[i].state.size()) +
                  " channel values, expected " + std::to_string(channels.size()));
    if (i == 0 && entries[i].tick != 0) throw Error("time sequence must start at tick 0");
    if (i > 0 && entries[i].tick < entries[i - 1].tick)
      throw Error("tick identifiers decrease at entry " + std::to_string(i));
  }
}

TimedStateSequence TimedStateSequence::prefix(std::size_t n) const {
  TimedStateSequence out;
  out.channels = channels;
  out.open_ended = open_ended;
  out.entries.assign(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(std::min(n, entries.size())));
  return out;
}

}  // namespace btrv
