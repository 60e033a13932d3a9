from __future__ import annotations

import json

import pytest

from dynpi import cli, pipeline
from dynpi.errors import InternalError
from dynpi.serialize import parse_json

FAST = ["--package", "arraylist", "--max-redundant", "0"]


def test_artifacts(tmp_path, capsys):
    assert cli.main(FAST + ["--out", str(tmp_path), "--dot", "--oracle-bound", "2"]) == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert {"raw.json", "extrapolated.json", "merged.json", "isolated.json", "dpi.json",
            "summary.json", "dot"} <= names
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert [s["name"] for s in summary["stages"]] == ["raw", "extrapolated", "merged", "isolated"]
    assert summary["coverage"]["uncovered"] == []
    dpi = parse_json((tmp_path / "dpi.json").read_text())
    assert len(dpi.rules) == summary["stages"][-1]["rule_count"]
    assert len(list((tmp_path / "dot").iterdir())) == len(dpi.rules)
    assert "isolated" in capsys.readouterr().out


def test_dpi_json_is_byte_stable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(FAST + ["--out", str(a)]) == 0
    assert cli.main(FAST + ["--out", str(b)]) == 0
    assert (a / "dpi.json").read_bytes() == (b / "dpi.json").read_bytes()


def test_prints_rules_without_out(capsys):
    assert cli.main(FAST) == 0
    assert "Rule#" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["--package", "nosuch"],
    ["--package", "jdbc", "--callee-three-valued", "maybe"],
    ["--package", "jdbc", "--option", "novalue"],
])
def test_bad_arguments_exit_2(argv):
    with pytest.raises(SystemExit) as ex:
        cli.main(argv)
    assert ex.value.code == 2


@pytest.mark.parametrize("argv", [
    FAST + ["--repeat-creation", "0"],
    ["--package", "jdbc", "--option", "bogus=1"],
    FAST + ["--oracle-bound", "-1"],
])
def test_configuration_errors_exit_2(argv, capsys):
    assert cli.main(argv) == 2
    assert "configuration error" in capsys.readouterr().err


def test_option_parsing():
    assert cli._option("distinguish_add_return=false") == ("distinguish_add_return", False)
    assert cli._option("k=3") == ("k", 3)
    assert cli._option("k=abc") == ("k", "abc")


def test_internal_error_exits_3(monkeypatch, capsys):
    def boom(cfg):
        raise InternalError("invariant broken")
    monkeypatch.setattr(cli, "run_pipeline", boom)
    assert cli.main(FAST) == 3
    assert "internal error" in capsys.readouterr().err


def test_oracle_miss_exits_3(monkeypatch, capsys):
    monkeypatch.setattr(pipeline, "uncovered", lambda rules, final: list(rules)[:1])
    assert cli.main(FAST + ["--oracle-bound", "1"]) == 3
    assert "uncovered" in capsys.readouterr().out
