#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "btrv/core/engine.hpp"
#include "btrv/core/tss.hpp"

namespace btrv {

/// Trace file, version 1. Line oriented:
///
///     btrv-trace 1 open|closed
///     channel <index> <source> <dest>
///     E <tick> [<index>=<message> | <index>=-]...
///     V <monitor> <tick> <position> <index> <message>
///
/// Each `E` line is one TSS entry and lists only the channels whose value
/// differs from the previous entry (`-` = no message). `V` lines record
/// online monitor violations and are ignored by the offline evaluator.
struct TraceFile {
  TimedStateSequence tss;
  std::vector<ViolationRecord> violations;
};

inline constexpr int kTraceFormatVersion = 1;

void write_trace(std::ostream& out, const TimedStateSequence& tss, const std::vector<ViolationRecord>& violations = {});
std::string trace_to_string(const TimedStateSequence& tss, const std::vector<ViolationRecord>& violations = {});

/// Throws Error("line N: ...") on malformed input.
TraceFile read_trace(std::istream& in);
TraceFile read_trace_string(const std::string& text);

}  // namespace btrv
