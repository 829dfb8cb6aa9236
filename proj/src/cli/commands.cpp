#include "btrv/cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "btrv/core/errors.hpp"
#include "btrv/core/text_format.hpp"
#include "btrv/core/trace_io.hpp"
#include "btrv/scenario/scenario.hpp"

namespace btrv::cli {

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = std::make_shared<spdlog::logger>("btrv", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("BTRV_LOG")) l->set_level(spdlog::level::from_str(env));
    return l;
  }();
  return log;
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(std::string("cannot open ") + what + " '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string violation_line(const monitor::MonitorVerdict& v) {
  return "violation monitor=" + v.monitor + " tick=" + std::to_string(v.tick) +
         " position=" + std::to_string(v.position) + " channel=" + to_string(v.channel) +
         " message=" + format_message(v.message);
}

ChannelKey parse_channel_arg(const std::string& text) {
  auto arrow = text.find("->");
  if (arrow == std::string::npos || arrow == 0 || arrow + 2 >= text.size())
    throw Error("expected a channel written SOURCE->DEST, got '" + text + "'");
  return {text.substr(0, arrow), text.substr(arrow + 2)};
}

}  // namespace

bool RunReport::violated() const {
  for (const auto& v : verdicts)
    if (v.status == monitor::MonitorVerdict::Status::Violated) return true;
  return false;
}

RunReport execute_run(const RunRequest& request, ExecutionTrace* trace_out) {
  scenario::ScenarioConfig config =
      request.config_path.empty() ? scenario::default_config() : scenario::load_config(request.config_path);
  if (request.seed) config.seed = *request.seed;
  if (request.horizon) config.horizon = *request.horizon;
  if (request.theta) config.theta = *request.theta;

  scenario::Scenario s = scenario::build_scenario(config);
  logger()->info("built scenario: {} processes, {} channels", s.system.processes().size(),
                 s.system.channels().size());

  const std::string props = request.properties_path ? read_file(*request.properties_path, "property file")
                                                    : scenario::default_requirements(config.theta);
  std::vector<monitor::MonitorGraph> monitors;
  try {
    monitors = scenario::monitors_from_properties(props, s, {{"theta", config.theta}});
  } catch (const ParseError& e) {
    if (request.properties_path) throw ParseError(*request.properties_path + ": " + e.message(), e.line(), e.column());
    throw;
  }
  for (const auto& path : request.monitor_paths)
    for (auto& p : parse_processes(read_file(path, "monitor file"))) monitors.push_back(monitor::from_process(p));

  ChannelSystem cs = monitor::attach(s.system, monitors);
  RunOptions opts = s.run_options(cs);
  opts.stop_on_violation = request.stop_on_violation;
  RandomScheduler scheduler(config.seed);
  ExecutionTrace trace = run(cs, scheduler, opts);
  logger()->info("run finished: {} steps, {} ticks, status {}", trace.steps, trace.ticks, to_string(trace.status));

  RunReport r;
  r.seed = config.seed;
  r.horizon = config.horizon;
  r.status = trace.status;
  r.verdicts = monitor::verdicts(trace, monitors);
  r.steps = trace.steps;
  r.ticks = trace.ticks;
  for (const auto& key : cs.channel_keys()) r.messages[to_string(key)] = 0;
  for (const auto& t : trace.transmissions) ++r.messages[to_string(cs.channels()[t.channel].key)];
  if (request.trace_out) {
    std::ofstream out(*request.trace_out);
    if (!out) throw Error("cannot write trace file '" + *request.trace_out + "'");
    write_trace(out, trace.tss, trace.violations);
    r.trace_path = *request.trace_out;
  }
  if (trace_out) *trace_out = std::move(trace);
  return r;
}

std::string report_text(const RunReport& r) {
  std::ostringstream os;
  os << "seed " << r.seed << ", horizon " << r.horizon << " steps\n";
  os << "status " << to_string(r.status) << " after " << r.steps << " steps and " << r.ticks << " ticks\n";
  for (const auto& v : r.verdicts) {
    os << "  " << v.monitor << ": ";
    if (v.status == monitor::MonitorVerdict::Status::Running)
      os << "running\n";
    else
      os << "violated at tick " << v.tick << ", position " << v.position << " (" << to_string(v.channel) << " "
         << format_message(v.message) << ")\n";
  }
  if (!r.trace_path.empty()) os << "trace written to " << r.trace_path << "\n";
  os << "messages per channel:\n";
  for (const auto& [ch, n] : r.messages)
    if (n > 0) os << "  " << ch << " " << n << "\n";
  return os.str();
}

std::string report_json(const RunReport& r) {
  nlohmann::json j;
  j["seed"] = r.seed;
  j["horizon"] = r.horizon;
  j["status"] = std::string(to_string(r.status));
  j["steps"] = r.steps;
  j["ticks"] = r.ticks;
  j["trace"] = r.trace_path.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.trace_path);
  j["verdicts"] = nlohmann::json::array();
  for (const auto& v : r.verdicts) {
    nlohmann::json o{{"monitor", v.monitor}};
    if (v.status == monitor::MonitorVerdict::Status::Running) {
      o["status"] = "running";
    } else {
      o["status"] = "violated";
      o["tick"] = v.tick;
      o["position"] = v.position;
      o["channel"] = to_string(v.channel);
      o["message"] = format_message(v.message);
    }
    j["verdicts"].push_back(std::move(o));
  }
  j["messages"] = r.messages;
  return j.dump(2) + "\n";
}

std::vector<CheckResult> check_trace(const TimedStateSequence& rho, const scope::PropertySet& properties) {
  std::vector<CheckResult> out;
  for (const auto& p : properties.properties) {
    CheckResult c;
    c.property = p.name;
    c.verdict = scope::evaluate(*p.formula, rho, 0);
    if (c.verdict == scope::Verdict::False) {
      c.violation_position = scope::earliest_violation(*p.formula, rho);
      if (c.violation_position) c.violation_tick = rho.entries[*c.violation_position].tick;
    }
    out.push_back(std::move(c));
  }
  return out;
}

int cmd_run(const RunRequest& request, const std::string& report_format, std::ostream& out, std::ostream& err) {
  RunReport r;
  try {
    r = execute_run(request);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  for (const auto& v : r.verdicts)
    if (v.status == monitor::MonitorVerdict::Status::Violated) err << violation_line(v) << "\n";
  out << (report_format == "machine" ? report_json(r) : report_text(r));
  return r.violated() ? kViolation : kOk;
}

int cmd_check(const std::string& trace_path, const std::string& properties_path,
              const std::map<std::string, std::int64_t>& params, const std::string& report_format, std::ostream& out,
              std::ostream& err) {
  std::vector<CheckResult> results;
  try {
    std::ifstream in(trace_path);
    if (!in) throw Error("cannot open trace file '" + trace_path + "'");
    TraceFile tf;
    try {
      tf = read_trace(in);
    } catch (const Error& e) {
      throw Error(trace_path + ": " + e.what());
    }
    auto props = scope::load_property_file(properties_path, params);
    results = check_trace(tf.tss, props);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  bool any_false = false;
  if (report_format == "machine") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : results) {
      nlohmann::json o{{"property", c.property}, {"verdict", std::string(scope::to_string(c.verdict))}};
      if (c.violation_position) {
        o["position"] = *c.violation_position;
        o["tick"] = *c.violation_tick;
      }
      j.push_back(std::move(o));
    }
    out << j.dump(2) << "\n";
  } else {
    for (const auto& c : results) {
      out << c.property << ": " << scope::to_string(c.verdict);
      if (c.violation_position)
        out << " (earliest violation at position " << *c.violation_position << ", tick " << *c.violation_tick << ")";
      out << "\n";
    }
  }
  for (const auto& c : results) any_false = any_false || c.verdict == scope::Verdict::False;
  return any_false ? kViolation : kOk;
}

int cmd_synth(const std::string& properties_path, const std::map<std::string, std::int64_t>& params,
              const std::optional<std::string>& out_dir, bool dot, const std::string& tick_channel, std::ostream& out,
              std::ostream& err) {
  scope::PropertySet props;
  monitor::CompileOptions opts;
  try {
    props = scope::load_property_file(properties_path, params);
    opts.tick_channel = parse_channel_arg(tick_channel);
    if (out_dir) std::filesystem::create_directories(*out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  bool rejected = false;
  for (const auto& p : props.properties) {
    monitor::MonitorGraph g;
    try {
      g = monitor::synthesize(monitor::compile_from_scope(p.name, *p.formula, opts));
    } catch (const monitor::NotMonitorable& e) {
      err << p.name << " (line " << p.line << "): " << e.what() << "\n";
      rejected = true;
      continue;
    }
    const std::string text = to_text(g.process);
    if (out_dir) {
      const auto base = std::filesystem::path(*out_dir) / p.name;
      std::ofstream(base.string() + ".pg") << text;
      if (dot) std::ofstream(base.string() + ".dot") << monitor::to_dot(g.process);
      out << "wrote " << base.string() << ".pg" << (dot ? " and .dot" : "") << "\n";
    } else {
      out << text << "\n";
      if (dot) out << monitor::to_dot(g.process) << "\n";
    }
  }
  return rejected ? kViolation : kOk;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Runtime verification of behavior trees: run, check and synthesize monitors"};
  app.require_subcommand(1);

  RunRequest run_req;
  std::string run_format = "text";
  std::string properties;
  auto* run_cmd = app.add_subcommand("run", "Run the instrumented robot scenario");
  run_cmd->add_option("config", run_req.config_path, "Scenario config (JSON)")->required();
  run_cmd->add_option("properties", properties, "SCOPE property file (default: built-in requirements)");
  run_cmd->add_option("--monitor", run_req.monitor_paths, "Extra monitor file in program-graph text format");
  run_cmd->add_option("--seed", run_req.seed, "Scheduler seed");
  run_cmd->add_option("--horizon", run_req.horizon, "Engine steps");
  run_cmd->add_option("--theta", run_req.theta, "Response deadline in ticks");
  run_cmd->add_flag("--stop-on-violation", run_req.stop_on_violation, "Stop at the first violation");
  run_cmd->add_option("--trace-out", run_req.trace_out, "Write the timed state sequence here");
  run_cmd->add_option("--report", run_format, "Report format")->check(CLI::IsMember({"text", "machine"}));

  std::string trace_path, check_props, check_format = "text";
  std::optional<std::int64_t> check_theta;
  auto* check_cmd = app.add_subcommand("check", "Evaluate properties offline against a trace file");
  check_cmd->add_option("trace", trace_path, "Trace file")->required();
  check_cmd->add_option("properties", check_props, "SCOPE property file")->required();
  check_cmd->add_option("--theta", check_theta, "Override the theta parameter");
  check_cmd->add_option("--report", check_format, "Report format")->check(CLI::IsMember({"text", "machine"}));

  std::string synth_props, tick_channel = "TickGenerator->BT_Root";
  std::optional<std::string> out_dir;
  std::optional<std::int64_t> synth_theta;
  bool dot = false;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize monitor program graphs from properties");
  synth_cmd->add_option("properties", synth_props, "SCOPE property file")->required();
  synth_cmd->add_option("--out-dir", out_dir, "Write <name>.pg (and <name>.dot) files here");
  synth_cmd->add_flag("--dot", dot, "Also emit Graphviz sources");
  synth_cmd->add_option("--theta", synth_theta, "Override the theta parameter");
  synth_cmd->add_option("--tick-channel", tick_channel, "Channel carrying ticks, SOURCE->DEST");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  auto theta_params = [](const std::optional<std::int64_t>& theta) {
    std::map<std::string, std::int64_t> m;
    if (theta) m["theta"] = *theta;
    return m;
  };
  if (*run_cmd) {
    if (!properties.empty()) run_req.properties_path = properties;
    return cmd_run(run_req, run_format, out, err);
  }
  if (*check_cmd) return cmd_check(trace_path, check_props, theta_params(check_theta), check_format, out, err);
  return cmd_synth(synth_props, theta_params(synth_theta), out_dir, dot, tick_channel, out, err);
}

}  // namespace btrv::cli
