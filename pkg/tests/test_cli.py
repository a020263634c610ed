import csv
import json

import pytest

from tentspace.cli import main


def _run(tmp_path, *args, out="out"):
    return main(["run", "--out", str(tmp_path / out), "--grid-preset", "fast", *args])


def test_a1_sweep_writes_outputs(tmp_path, capsys):
    assert _run(tmp_path, "--experiment", "a1-sweep", "--n", "1", "--p", "1", "--alphas", "2,4,8,16,32") == 0
    assert "a1-sweep: PASS" in capsys.readouterr().out
    rows = list(csv.DictReader(open(tmp_path / "out" / "a1-sweep.csv")))
    assert rows and {"experiment", "alpha", "norm", "passed"} <= set(rows[0])
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["passed"] is True


def test_l2_fubini(tmp_path):
    assert _run(tmp_path, "--experiment", "l2-fubini", "--n", "1") == 0


@pytest.mark.parametrize(
    "args",
    [
        ["--experiment", "a1-sweep", "--p", "0"],
        ["--experiment", "a1-sweep", "--p", "-1"],
        ["--experiment", "nope"],
        [],  # no experiment
    ],
)
def test_usage_errors(tmp_path, args):
    with pytest.raises(SystemExit) as exc:
        _run(tmp_path, *args)
    assert exc.value.code != 0


def test_config_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("experiment: a2-sweep\nn: 1\np: [1]\nalphas: [2, 4, 8]\n")
    assert _run(tmp_path, "--config", str(cfg), "--alphas", "2,4,8,16") == 0
    entry = json.loads((tmp_path / "out" / "summary.json").read_text())["experiments"][0]
    assert entry["experiment"] == "a2-sweep"
    assert entry["config"]["alphas"] == [2, 4, 8, 16]


def test_seed_determinism_and_jobs(tmp_path):
    args = ["--experiment", "l2-fubini,atom-transport", "--n", "1", "--seed", "7"]
    _run(tmp_path, *args, "--jobs", "1", out="a")
    _run(tmp_path, *args, "--jobs", "1", out="b")
    _run(tmp_path, *args, "--jobs", "2", out="c")
    for name in ("l2-fubini.csv", "atom-transport.csv"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes() == (tmp_path / "c" / name).read_bytes()
