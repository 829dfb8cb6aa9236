import pathlib

import pytest

import btrv

ROOT = pathlib.Path(__file__).resolve().parents[2]
CONFIGS = ROOT / "configs"


def test_formula_normalizes_abbreviations():
    assert btrv.normalize_formula("not true") == "false"
    text = "always (BatteryReader, BatteryLevel, m[1] = <ok> implies m[2] >= 20)"
    assert btrv.normalize_formula(btrv.normalize_formula(text)) == btrv.normalize_formula(text)
    assert btrv.formula_depth("time_until (A, B, m[1] = 1) < k", {"k": 3}) == 1


def test_parse_errors_raise():
    with pytest.raises(btrv.ParseError):
        btrv.normalize_formula("always (A, B, m[1] = )")
    with pytest.raises(btrv.Error):
        btrv.normalize_formula("time_until (A, B, m[1] = 1) < unbound")


def test_nominal_run_has_no_violations():
    report = btrv.run(CONFIGS / "default.json")
    assert report["steps"] == 5000
    assert [v["status"] for v in report["verdicts"]] == ["running", "running"]


def test_experiment1_violates_phi1(tmp_path):
    trace = tmp_path / "exp1.trace"
    report = btrv.run(CONFIGS / "experiment1.json", trace_out=trace)
    phi1 = report["verdicts"][0]
    assert phi1["monitor"] == "phi1"
    assert phi1["status"] == "violated"
    assert phi1["message"] == "[<ok>,10]"

    results = btrv.check(trace.read_text(), btrv.default_requirements(100))
    assert results[0]["verdict"] == "false"
    assert results[0]["position"] == phi1["position"]
    assert results[0]["tick"] == phi1["tick"]


def test_synthesize_and_reject():
    graphs = btrv.synthesize(btrv.default_requirements(100))
    assert set(graphs) == {"phi1", "phi2"}
    assert "Err" in graphs["phi2"]
    with pytest.raises(btrv.NotMonitorable):
        btrv.synthesize("property p = eventually (A, B, m[1] = 1);")


def test_defaults():
    cfg = btrv.default_config()
    assert cfg["threshold"] == 30 and cfg["theta"] == 100
    assert "GoToRechargingStation" in btrv.fig1_tree_text()
    assert btrv.fig1_tree_pretty().startswith("? Root")
