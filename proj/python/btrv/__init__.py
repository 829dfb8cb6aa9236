"""Runtime verification of behavior trees: SCOPE properties, monitors and the
simulated service-robot scenario."""

import json

from ._core import (
    Error,
    NotMonitorable,
    ParseError,
    check,
    default_config_json,
    default_requirements,
    fig1_tree_pretty,
    fig1_tree_text,
    formula_depth,
    normalize_formula,
    synthesize,
)
from . import _core

__all__ = [
    "Error",
    "NotMonitorable",
    "ParseError",
    "check",
    "default_config",
    "default_requirements",
    "fig1_tree_pretty",
    "fig1_tree_text",
    "formula_depth",
    "normalize_formula",
    "run",
    "synthesize",
]


def default_config():
    return json.loads(default_config_json())


def run(config=None, properties=None, *, seed=None, horizon=None, theta=None,
        stop_on_violation=False, trace_out=None):
    """Run the monitored scenario. `config` and `properties` are file paths;
    None selects the built-in defaults. Returns the report as a dict."""
    report = _core.run_json(
        None if config is None else str(config),
        None if properties is None else str(properties),
        seed, horizon, theta, stop_on_violation,
        None if trace_out is None else str(trace_out),
    )
    return json.loads(report)
