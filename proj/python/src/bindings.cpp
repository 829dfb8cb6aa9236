#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "btrv/bt/bt.hpp"
#include "btrv/cli/commands.hpp"
#include "btrv/core/errors.hpp"
#include "btrv/core/text_format.hpp"
#include "btrv/core/trace_io.hpp"
#include "btrv/monitor/monitor.hpp"
#include "btrv/scenario/scenario.hpp"
#include "btrv/scope/parser.hpp"
#include "btrv/scope/property_file.hpp"

namespace py = pybind11;
using namespace btrv;

namespace {

using Params = std::map<std::string, std::int64_t>;

ChannelKey channel_arg(const std::string& text) {
  auto arrow = text.find("->");
  if (arrow == std::string::npos) throw Error("expected SOURCE->DEST, got '" + text + "'");
  return {text.substr(0, arrow), text.substr(arrow + 2)};
}

std::string run_json(const std::optional<std::string>& config, const std::optional<std::string>& properties,
                     std::optional<std::uint64_t> seed, std::optional<std::uint64_t> horizon,
                     std::optional<std::int64_t> theta, bool stop_on_violation,
                     const std::optional<std::string>& trace_out) {
  cli::RunRequest req;
  req.config_path = config.value_or("");
  req.properties_path = properties;
  req.seed = seed;
  req.horizon = horizon;
  req.theta = theta;
  req.stop_on_violation = stop_on_violation;
  req.trace_out = trace_out;
  return cli::report_json(cli::execute_run(req));
}

std::vector<py::dict> check(const std::string& trace_text, const std::string& properties, const Params& params) {
  TraceFile tf = read_trace_string(trace_text);
  std::vector<py::dict> out;
  for (const auto& c : cli::check_trace(tf.tss, scope::parse_property_file(properties, params))) {
    py::dict d;
    d["property"] = c.property;
    d["verdict"] = std::string(scope::to_string(c.verdict));
    d["position"] = c.violation_position ? py::cast(*c.violation_position) : py::none();
    d["tick"] = c.violation_tick ? py::cast(*c.violation_tick) : py::none();
    out.push_back(d);
  }
  return out;
}

std::map<std::string, std::string> synthesize(const std::string& properties, const std::string& tick_channel,
                                              const Params& params) {
  monitor::CompileOptions opts;
  opts.tick_channel = channel_arg(tick_channel);
  std::map<std::string, std::string> out;
  for (const auto& p : scope::parse_property_file(properties, params).properties)
    out[p.name] = to_text(monitor::synthesize(monitor::compile_from_scope(p.name, *p.formula, opts)).process);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Behavior-tree runtime verification: SCOPE properties, monitors and the robot scenario";

  // Translators run newest first, so the base class goes in first.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<monitor::NotMonitorable>(m, "NotMonitorable", base.ptr());

  m.def(
      "normalize_formula",
      [](const std::string& text, const Params& params) {
        scope::ParseOptions opts;
        opts.params = params;
        return scope::to_string(*scope::parse(text, opts));
      },
      py::arg("text"), py::arg("params") = Params{}, "Parse a SCOPE formula and print it back in canonical form.");
  m.def(
      "formula_depth",
      [](const std::string& text, const Params& params) {
        scope::ParseOptions opts;
        opts.params = params;
        return scope::depth(*scope::parse(text, opts));
      },
      py::arg("text"), py::arg("params") = Params{});
  m.def("default_requirements", &scenario::default_requirements, py::arg("theta") = 100);
  m.def("default_config_json", [] { return scenario::to_json(scenario::default_config()); });
  m.def("fig1_tree_text", [] { return bt::to_text(scenario::fig1_tree()); });
  m.def("fig1_tree_pretty", [] { return bt::pretty(scenario::fig1_tree()); });
  m.def("run_json", &run_json, py::arg("config") = py::none(), py::arg("properties") = py::none(),
        py::arg("seed") = py::none(), py::arg("horizon") = py::none(), py::arg("theta") = py::none(),
        py::arg("stop_on_violation") = false, py::arg("trace_out") = py::none(),
        "Run the monitored scenario; returns the machine-readable report.");
  m.def("check", &check, py::arg("trace_text"), py::arg("properties"), py::arg("params") = Params{},
        "Evaluate properties offline against the text of a trace file.");
  m.def("synthesize", &synthesize, py::arg("properties"), py::arg("tick_channel") = "TickGenerator->BT_Root",
        py::arg("params") = Params{}, "Monitor program graphs, in text form, keyed by property name.");
}
