"""Per-episode metrics CSVs and their aggregation over seeds."""
from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

SCHEMA_VERSION = 1
SUMMARY_NAME = "summary.csv"


@dataclass
class MetricsRecord:
    schema_version: int
    run_id: str
    agent: str
    seed: int
    task: int
    episode: int
    extrinsic_return: float
    steps: int
    unique_states: int
    new_states: int
    success: int
    loss_s: float
    loss_csc: float
    embedding_checksum: str
    wall_clock: float


COLUMNS = [f.name for f in fields(MetricsRecord)]
VOLATILE = ("wall_clock",)


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


class MetricsWriter:
    """Appends one row per episode and flushes, so a killed run leaves a valid prefix."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "w", newline="")
        self._csv = csv.writer(self._fh, lineterminator="\n")
        self._csv.writerow(COLUMNS)
        self._fh.flush()

    def write(self, rec: MetricsRecord) -> None:
        self._csv.writerow([_cell(v) for v in astuple(rec)])
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_metrics(path) -> List[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        return list(reader)


def stable_bytes(path) -> bytes:
    """File content with the volatile columns removed, for determinism checks."""
    keep = [i for i, c in enumerate(COLUMNS) if c not in VOLATILE]
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return "\n".join(",".join(r[i] for i in keep) for r in rows).encode()


def moving_average(x: np.ndarray, window: int) -> np.ndarray:
    """Trailing mean over up to ``window`` values."""
    c = np.concatenate([[0.0], np.cumsum(x)])
    idx = np.arange(1, len(x) + 1)
    lo = np.maximum(idx - window, 0)
    return (c[idx] - c[lo]) / (idx - lo)


def _metrics_files(directory: Path) -> List[Path]:
    out = []
    for p in sorted(directory.rglob("*.csv")):
        if p.name == SUMMARY_NAME:
            continue
        with open(p, newline="") as fh:
            header = fh.readline().strip().split(",")
        if header and header[0] == "schema_version":
            out.append(p)
    return out


def aggregate_runs(directory, window: int = 20, out_path=None) -> Path:
    """Mean and interquartile range of returns over seeds per (agent, task, episode).

    Also writes a trailing moving average (``window`` episodes, within a task)
    of the mean return.  Every input must share the current schema.
    """
    directory = Path(directory)
    files = _metrics_files(directory) if directory.is_dir() else []
    if not files:
        raise FileNotFoundError(f"no metrics CSV files under {directory}")
    cells: Dict[Tuple[str, int, int], List[Tuple[float, float]]] = defaultdict(list)
    for p in files:
        with open(p, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != COLUMNS:
                raise ValueError(f"mixed schemas: {p} has columns {reader.fieldnames}")
            for row in reader:
                if int(row["schema_version"]) != SCHEMA_VERSION:
                    raise ValueError(f"mixed schemas: {p} has version {row['schema_version']}")
                key = (row["agent"], int(row["task"]), int(row["episode"]))
                cells[key].append((float(row["extrinsic_return"]), float(row["unique_states"])))
    out_path = Path(out_path) if out_path else directory / SUMMARY_NAME
    rows = []
    for key in sorted(cells):
        vals = np.array(cells[key])
        q25, q75 = np.percentile(vals[:, 0], [25, 75])
        rows.append([*key, len(vals), vals[:, 0].mean(), q25, q75, q75 - q25, vals[:, 1].mean()])
    # smoothing runs along episodes within each (agent, task)
    groups = defaultdict(list)
    for i, r in enumerate(rows):
        groups[(r[0], r[1])].append(i)
    smooth = [math.nan] * len(rows)
    for idx in groups.values():
        ma = moving_average(np.array([rows[i][4] for i in idx]), window)
        for i, v in zip(idx, ma):
            smooth[i] = v
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["agent", "task", "episode", "n_seeds", "mean_return", "q25_return",
                    "q75_return", "iqr_return", "smoothed_return", "mean_unique_states"])
        for r, s in zip(rows, smooth):
            w.writerow([_cell(v) for v in (*r[:4], float(r[4]), float(r[5]), float(r[6]),
                                           float(r[7]), float(s), float(r[8]))])
    return out_path


def read_summary(path) -> List[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
