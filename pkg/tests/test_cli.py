import subprocess
import sys

import pytest

from embtransfer.cli import main
from embtransfer.harness import OUTPUT_ROOT_ENV, read_metrics, read_pgm

CONFIG = """\
layout = empty_room
size = 3
max_steps = 30
agents = qlearning, qlearning+
seeds = 0
task_count = 2
episodes_per_task = 3
"""


@pytest.fixture
def cfg_file(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "out"))
    path = tmp_path / "demo.cfg"
    path.write_text(CONFIG)
    return path


def test_run_aggregate_heatmap(cfg_file, tmp_path):
    assert main(["run", str(cfg_file), "-q"]) == 0
    out = tmp_path / "out" / "demo"
    assert len(read_metrics(out / "metrics" / "qlearning_seed0.csv")) == 6
    assert (out / "resolved_config.txt").exists()
    assert main(["aggregate", str(out)]) == 0
    assert (out / "summary.csv").exists()
    assert main(["heatmap", str(out / "snapshots" / "qlearning_seed0.jsonl"),
                 str(tmp_path / "h.pgm"), "--field", "ir"]) == 0
    assert read_pgm(tmp_path / "h.pgm").max() == 255
    assert main(["heatmap", str(out / "snapshots" / "qlearning_seed0.jsonl"),
                 str(tmp_path / "g.pgm"), "--layout", "empty_room", "--size", "3"]) == 0
    assert read_pgm(tmp_path / "g.pgm").shape == (5, 5)


def test_explore(cfg_file, tmp_path):
    assert main(["explore", str(cfg_file), "-q"]) == 0
    assert (tmp_path / "out" / "demo" / "heatmaps" / "qlearning+_seed0_ir.pgm").exists()


def test_exit_codes(cfg_file, tmp_path):
    assert main(["run", str(tmp_path / "nope.cfg")]) == 1
    bad = tmp_path / "bad.cfg"
    bad.write_text("episodes_per_task = 0\n")
    assert main(["run", str(bad)]) == 1
    assert main(["explore", str(cfg_file).replace("demo", "nope")]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["aggregate", str(tmp_path / "empty")]) == 2
    assert main(["heatmap", str(tmp_path / "none.jsonl"), str(tmp_path / "x.pgm")]) == 2
    assert main(["heatmap", str(tmp_path / "none.jsonl"), str(tmp_path / "x.pgm"),
                 "--layout", "/no/map.txt"]) == 1


def test_explore_unpaired_is_config_error(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "out"))
    path = tmp_path / "c.cfg"
    path.write_text(CONFIG.replace("qlearning, qlearning+", "qlearning"))
    assert main(["explore", str(path)]) == 1


def test_module_entry_point(cfg_file):
    proc = subprocess.run([sys.executable, "-m", "embtransfer", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "aggregate" in proc.stdout
