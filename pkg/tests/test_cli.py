import csv
import json
from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

from credotune.cli import SWEEP_HEADER, main
from credotune.config import load_config
from credotune.report import REPORT_HEADER

SMALL = {
    "env": {"kind": "cleanup", "episode_length": 10},
    "total_batches": 4,
    "episodes_per_batch": 1,
    "initial_credos": [0.0, 1.0, 0.0],
    "trials": 2,
}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(SMALL))
    return path


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def test_run_writes_outputs(config_file, tmp_path):
    out = tmp_path / "out"
    result = invoke("run", "--config", config_file, "--out", out)
    assert result.exit_code == 0, result.output
    assert "final mean population reward" in result.output
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["initial_credos"] == [0.0, 1.0, 0.0]
    assert len(summary["trials"]) == 2
    assert (out / "checkpoints" / "trial_1.npz").exists()


def test_run_rejects_bad_credo_sum(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump({**SMALL, "initial_credos": [0.2, 0.5, 0.5]}))
    result = invoke("run", "--config", path, "--out", tmp_path / "o")
    assert result.exit_code != 0
    assert "initial_credos" in result.output and "sum to 1.2" in result.output


def test_run_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump({**SMALL, "episodes": 3}))
    result = invoke("run", "--config", path, "--out", tmp_path / "o")
    assert result.exit_code != 0 and "episodes" in result.output


def test_run_missing_config(tmp_path):
    result = invoke("run", "--config", tmp_path / "nope.yaml", "--out", tmp_path / "o")
    assert result.exit_code != 0 and "cannot read config" in result.output


def test_overrides_and_determinism(config_file, tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = invoke("run", "--config", config_file, "--out", out, "--override", "master_seed=7",
                        "--override", "env.episode_length=12", "--trials", 1)
        assert result.exit_code == 0, result.output
        outs.append(out)
    a, b = ((o / "timeseries.csv").read_bytes() for o in outs)
    assert a == b
    summary = json.loads((outs[0] / "summary.json").read_text())
    assert summary["config"]["master_seed"] == 7
    assert summary["config"]["env"]["episode_length"] == 12
    assert summary["config"]["trials"] == 1


def test_bad_override_syntax(config_file, tmp_path):
    result = invoke("run", "--config", config_file, "--out", tmp_path / "o", "--override", "master_seed")
    assert result.exit_code != 0 and "key=value" in result.output


def write_sweep(tmp_path, config_file, **spec):
    path = tmp_path / "sweep.yaml"
    path.write_text(yaml.safe_dump({"base_config": config_file.name, "trials": 1, **spec}))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_sweep_vertices(config_file, tmp_path):
    sweep = write_sweep(tmp_path, config_file, points=[[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    result = invoke("sweep", "--config", sweep, "--out", tmp_path / "sw")
    assert result.exit_code == 0, result.output
    rows = read_csv(tmp_path / "sw" / "sweep.csv")
    assert rows[0] == SWEEP_HEADER
    assert [tuple(map(float, r[:3])) for r in rows[1:]] == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_sweep_defaults_to_full_lattice(config_file, tmp_path):
    sweep = write_sweep(tmp_path, config_file, overrides=["total_batches=1", "env.episode_length=2"])
    result = invoke("sweep", "--config", sweep, "--out", tmp_path / "sw")
    assert result.exit_code == 0, result.output
    assert len(read_csv(tmp_path / "sw" / "sweep.csv")) == 1 + 21


def test_sweep_rejects_duplicates(config_file, tmp_path):
    sweep = write_sweep(tmp_path, config_file, points=[[1, 0, 0], [1.0, 0.0, 0.0]])
    result = invoke("sweep", "--config", sweep, "--out", tmp_path / "sw")
    assert result.exit_code != 0 and "duplicate sweep cell" in result.output


def test_sweep_rejects_off_lattice_point(config_file, tmp_path):
    sweep = write_sweep(tmp_path, config_file, points=[[0.1, 0.1, 0.8]])
    result = invoke("sweep", "--config", sweep, "--out", tmp_path / "sw")
    assert result.exit_code != 0 and "points[0]" in result.output


def test_report_round_trip(config_file, tmp_path):
    out = tmp_path / "exp"
    assert invoke("run", "--config", config_file, "--out", out).exit_code == 0
    result = invoke("report", out, "--out", tmp_path / "r1.csv")
    assert result.exit_code == 0, result.output
    rows = read_csv(tmp_path / "r1.csv")
    assert rows[0] == REPORT_HEADER and len(rows) == 2 and rows[1][1] == "2"

    copy = tmp_path / "copy"
    copy.mkdir()
    (copy / "timeseries.csv").write_bytes((out / "timeseries.csv").read_bytes())
    result = invoke("report", out, copy, "--out", tmp_path / "r2.csv")
    assert result.exit_code == 0
    assert "tied" in result.output
    rows = read_csv(tmp_path / "r2.csv")
    assert rows[1][2:] == rows[2][2:]


def test_report_corrupt_directory(tmp_path):
    bad = tmp_path / "broken"
    bad.mkdir()
    (bad / "timeseries.csv").write_text("not,a,timeseries\n")
    result = invoke("report", bad, "--out", tmp_path / "r.csv")
    assert result.exit_code != 0 and "broken" in result.output
    result = invoke("report", tmp_path / "missing", "--out", tmp_path / "r.csv")
    assert result.exit_code != 0 and "missing" in result.output


CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.mark.parametrize("name", ["team_focus.yaml", "system_focus.yaml", "tuning.yaml", "bandit.yaml"])
def test_shipped_configs_parse(name):
    load_config(CONFIG_DIR / name)


def test_shipped_sweep_points_base_config():
    spec = yaml.safe_load((CONFIG_DIR / "sweep.yaml").read_text())
    assert (CONFIG_DIR / spec["base_config"]).is_file()
