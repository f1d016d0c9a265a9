from __future__ import annotations

import json
import subprocess
import sys

import pytest

from tautring import cli


def test_build_stack(tmp_path, capsys):
    code = cli.main(["build", "2", "0", "--kind", "stack", "--dmax", "8", "--trim", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == cli.EXIT_OK
    assert "FAIL" not in out
    data = json.loads((tmp_path / "build.json").read_text())
    assert data["ok"] is True
    assert (tmp_path / "build.csv").read_text().startswith("section,key,value\n")


@pytest.mark.parametrize("argv", [
    ["build", "0", "1"],
    ["build", "2", "0"],
    ["euler", "2", "0"],
    ["bps", "--mu", "x"],
    ["frobnicate"],
    ["registry-verify"],
    ["registry-verify", "--registry", "/nonexistent/reg.json"],
])
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == cli.EXIT_USAGE


def test_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["euler", "2", "1", "--out", str(a)]) == 0
    assert cli.main(["euler", "2", "1", "--out", str(b)]) == 0
    for name in ("euler.json", "euler.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_round_trip():
    ns = cli.build_parser().parse_args(["pc", "3", "1", "--dimension-only", "--dmax", "4", "--use-ln"])
    cfg = cli.RunConfig.from_args(ns)
    assert cfg.subspace is False and cfg.use_ln and cfg.targets == [(3, 1, "space")]
    assert cli.RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_registry_verify_and_tamper(tmp_path, capsys):
    reg = tmp_path / "reg.json"
    assert cli.main(["build", "2", "1", "--registry", str(reg)]) == 0
    assert cli.main(["registry-verify", "--registry", str(reg)]) == 0
    data = json.loads(reg.read_text())
    data["rings"][0]["hilbert"][1] += 1
    reg.write_text(json.dumps(data))
    capsys.readouterr()
    assert cli.main(["registry-verify", "--registry", str(reg)]) == cli.EXIT_FAIL
    assert "FAIL load" in capsys.readouterr().out


def test_check_failure_exit_code(tmp_path, capsys):
    pt = tmp_path / "pt.txt"
    pt.write_text("1 1 : 0/5\n")
    assert cli.main(["gvpt", "--dmax", "1", "--pt-file", str(pt)]) == cli.EXIT_FAIL
    assert "FAIL pt_file" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["pc", "3", "1"],
    ["gv", "--dmax", "2"],
    ["bps", "--dmax", "2"],
    ["verify-appendix", "--n", "0", "--dmax", "3"],
])
def test_commands_pass(argv, capsys):
    assert cli.main(argv) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tautring.cli", "euler", "1", "0", "--mmax", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "PASS" in proc.stdout
