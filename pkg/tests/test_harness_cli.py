import json
import subprocess
import sys

import numpy as np
import pytest

from cliffdirac import cli
from cliffdirac.checks import REGISTRY, SUITES
from cliffdirac.errors import ConfigError
from cliffdirac.harness import SuiteConfig, exit_status, format_table, report_body, run_planewave, run_suite

FAST = dict(suite="algebra", samples=3)


def run_cli(*args):
    return cli.main(list(args))


def test_every_suite_has_checks():
    for s in SUITES:
        assert any(c.suite == s for c in REGISTRY.values())


def test_report_schema():
    rep = run_suite(SuiteConfig(**FAST))
    assert rep["kind"] == "verify"
    assert rep["summary"]["failed"] == 0
    for r in rep["checks"]:
        assert set(r) >= {"id", "anchor", "tier", "max_residual", "tolerance", "passed", "samples", "wall_time"}
        assert r["max_residual"] <= r["tolerance"]
    ids = [r["id"] for r in rep["checks"]]
    assert ids == sorted(ids)


def test_determinism_and_seed_dependence():
    a = report_body(run_suite(SuiteConfig(**FAST, seed=4)))
    b = report_body(run_suite(SuiteConfig(**FAST, seed=4)))
    c = report_body(run_suite(SuiteConfig(**FAST, seed=5)))
    assert a == b
    assert a != c


def test_check_streams_are_independent_of_suite_selection():
    """A check draws the same samples whether run alone or inside 'all'."""
    one = run_suite(SuiteConfig(suite="affine", samples=2, seed=1))
    full = run_suite(SuiteConfig(suite="all", samples=2, seed=1))
    by_id = {r["id"]: r for r in full["checks"]}
    for r in one["checks"]:
        assert by_id[r["id"]]["max_residual"] == r["max_residual"]


def test_tolerance_override_precedence():
    rep = run_suite(SuiteConfig(**FAST, tolerances={"algebraic": 1e-30, "algebra.trace": 1.0}))
    by_id = {r["id"]: r for r in rep["checks"]}
    assert by_id["algebra.trace"]["tolerance"] == 1.0
    assert by_id["algebra.oracle"]["tolerance"] == 1e-30
    assert exit_status(rep) == 1


def test_injected_failure():
    rep = run_suite(SuiteConfig(**FAST, inject_failure=True))
    assert rep["summary"]["failed_ids"] == ["harness.injected_failure"]
    assert exit_status(rep) == 1
    assert "FAIL" in format_table(rep)


@pytest.mark.parametrize("bad", [
    dict(suite="nope"), dict(samples=0), dict(seed=-1), dict(tolerances={"unknown.check": 1.0}),
    dict(tolerances={"fd": -1.0}),
])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        SuiteConfig(**bad).validate()


def test_config_from_dict_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        SuiteConfig.from_dict({"suite": "algebra", "colour": "blue"})


def test_planewave_report():
    rep = run_planewave([np.sqrt(2), 1, 0, 0], 1.0, "-1:1,-1:1,-1:1,-1:1@5x5x2x2")
    assert rep["summary"]["failed"] == 0
    by_id = {r["id"]: r for r in rep["checks"]}
    assert by_id["planewave.residual"]["samples"] == 100


# ---------------------------------------------------------------- CLI

def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run_cli("verify", "--suite", "algebra", "--samples", "2", "--out", str(out)) == 0
    assert json.loads(out.read_text())["summary"]["failed"] == 0
    assert run_cli("verify", "--suite", "algebra", "--samples", "2", "--inject-failure", "--out", str(out)) == 1
    assert run_cli("verify", "--suite", "algebra", "--samples", "2", "--tol", "algebra.oracle=1e-30",
                   "--out", str(out)) == 1
    assert run_cli("verify", "--suite", "bogus") == 2
    assert run_cli("verify", "--metric", "flrw:1,1", "--suite", "geometry") == 3
    assert run_cli("planewave", "--p", "1,1,0,0", "--m", "1") == 3
    assert run_cli("planewave", "--p", "1,0,0,0", "--m", "1", "--out", str(out)) == 0
    with pytest.raises(SystemExit) as exc:
        run_cli("verify", "--tol", "notapair")
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run_cli()
    assert exc.value.code == 2


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"suite": "algebra", "samples": 2, "seed": 3}))
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli("verify", "--config", str(cfg), "--out", str(out1)) == 0
    assert run_cli("verify", "--config", str(cfg), "--seed", "3", "--out", str(out2)) == 0
    a, b = json.loads(out1.read_text()), json.loads(out2.read_text())
    assert report_body(a) == report_body(b)
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run_cli("verify", "--config", str(bad)) == 2


def test_cli_catalog(capsys):
    assert run_cli("catalog") == 0
    text = capsys.readouterr().out
    for name in ("minkowski", "flrw", "conformally-flat", "polynomial-perturbed"):
        assert name in text


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cliffdirac.cli", "verify", "--suite", "algebra", "--samples", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["artifact"] == "cliffdirac"
