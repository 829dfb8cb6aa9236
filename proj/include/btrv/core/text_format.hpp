#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "btrv/core/program_graph.hpp"

namespace btrv {

/// Looks up a native effect referenced as `call name`; returns null if unknown.
using NativeRegistry = std::function<std::shared_ptr<const NativeEffect>(const std::string&)>;

/// Parses the declarative channel-system format:
///
///     system Demo
///     channel A -> B capacity 1
///     shared flag : bool = false
///     process A {
///       var n : int[0..3] = 0
///       initial idle
///       initially n = 0
///       idle --[n < 3 : n := n + 1]--> busy
///       busy --[ : !(A, B, [<ok>, n])]--> idle
///     }
///     monitor M { ... error Err }
///
/// Separators (`;`) are optional. Throws ParseError with line and column.
SystemDef parse_system(std::string_view text, const NativeRegistry& natives = nullptr);

/// Parses a file that holds only `process`/`monitor` blocks.
std::vector<ProcessDef> parse_processes(std::string_view text, const NativeRegistry& natives = nullptr);

std::string to_text(const SystemDef& def);
std::string to_text(const ProcessDef& process);

Domain parse_domain_text(std::string_view text);

}  // namespace btrv
