#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "btrv/core/engine.hpp"
#include "btrv/monitor/monitor.hpp"
#include "btrv/scope/evaluator.hpp"
#include "btrv/scope/property_file.hpp"

namespace btrv::cli {

enum ExitCode { kOk = 0, kViolation = 1, kUsage = 2 };

struct RunRequest {
  std::string config_path;                     // empty: built-in default config
  std::optional<std::string> properties_path;  // empty: built-in requirements
  std::vector<std::string> monitor_paths;      // hand-written monitor files
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> horizon;
  std::optional<std::int64_t> theta;
  bool stop_on_violation = false;
  std::optional<std::string> trace_out;
};

struct RunReport {
  std::uint64_t seed = 0;
  std::uint64_t horizon = 0;
  TerminalStatus status = TerminalStatus::Horizon;
  std::vector<monitor::MonitorVerdict> verdicts;
  std::string trace_path;
  std::uint64_t steps = 0;
  std::uint64_t ticks = 0;
  std::map<std::string, std::uint64_t> messages;  // per channel "A->B"

  bool violated() const;
};

/// Builds the scenario, attaches the monitors and runs it. Throws Error on
/// bad input. The full trace is returned through `trace` when given.
RunReport execute_run(const RunRequest& request, ExecutionTrace* trace = nullptr);

std::string report_text(const RunReport& r);
std::string report_json(const RunReport& r);

struct CheckResult {
  std::string property;
  scope::Verdict verdict = scope::Verdict::Inconclusive;
  std::optional<std::size_t> violation_position;
  std::optional<std::uint64_t> violation_tick;
};

std::vector<CheckResult> check_trace(const TimedStateSequence& rho, const scope::PropertySet& properties);

// Subcommands. Each returns an ExitCode and writes results to `out` and
// diagnostics to `err`.
int cmd_run(const RunRequest& request, const std::string& report_format, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& trace_path, const std::string& properties_path,
              const std::map<std::string, std::int64_t>& params, const std::string& report_format, std::ostream& out,
              std::ostream& err);
int cmd_synth(const std::string& properties_path, const std::map<std::string, std::int64_t>& params,
              const std::optional<std::string>& out_dir, bool dot, const std::string& tick_channel,
              std::ostream& out, std::ostream& err);

/// Argument parsing and dispatch for the `btrv` tool.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace btrv::cli
