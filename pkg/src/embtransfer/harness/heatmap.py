"""Per-state fields rendered as binary PGM images plus a lossless CSV sidecar."""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from ..dynamics import read_snapshot
from ..gridworld import GridSpec

Field = Union[Sequence[float], np.ndarray, Mapping[int, float]]
SNAPSHOT_FIELDS = ("N", "d_e", "ir", "degree")


def field_array(grid: GridSpec, field: Field) -> np.ndarray:
    """Dense array over ``grid.free_cells()``; states missing from a mapping are 0."""
    n = len(grid.free_cells())
    if isinstance(field, Mapping):
        out = np.zeros(n)
        for s, v in field.items():
            out[int(s)] = v
        return out
    arr = np.asarray(field, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"field has shape {arr.shape}, grid has {n} free cells")
    return arr


def to_gray(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    """Min-max normalize onto 0..255 over free cells; walls stay 0.

    A constant field maps every free cell to 255.
    """
    img = np.zeros((grid.height, grid.width), dtype=np.uint8)
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        gray = np.rint(255 * (values - lo) / (hi - lo))
    else:
        gray = np.full(len(values), 255.0)
    for (x, y), g in zip(grid.free_cells(), gray):
        img[y, x] = int(g)
    return img


def emit_heatmap(grid: GridSpec, field: Field, path) -> Path:
    """Write ``path`` (P5 graymap) and ``path`` with suffix ``.csv`` (raw values)."""
    path = Path(path)
    values = field_array(grid, field)
    img = to_gray(grid, values)
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (grid.width, grid.height))
        fh.write(img.tobytes())
    with open(path.with_suffix(".csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["state_id", "x", "y", "value"])
        for s, ((x, y), v) in enumerate(zip(grid.free_cells(), values)):
            w.writerow([s, x, y, repr(float(v))])
    return path


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    width, height, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError("only 8-bit graymaps are supported")
    return np.frombuffer(parts[4][:width * height], dtype=np.uint8).reshape(height, width)


def read_sidecar(path) -> np.ndarray:
    """Values from a heatmap sidecar, ordered by state id."""
    path = Path(path)
    if path.suffix != ".csv":
        path = path.with_suffix(".csv")
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = np.zeros(len(rows))
    for r in rows:
        out[int(r["state_id"])] = float(r["value"])
    return out


def snapshot_grid(records) -> GridSpec:
    """Bounding grid of a snapshot's cells; cells not in the snapshot become walls."""
    cells = {(int(r["x"]), int(r["y"])) for r in records}
    width = max(x for x, _ in cells) + 2
    height = max(y for _, y in cells) + 2
    walls = frozenset((x, y) for y in range(height) for x in range(width) if (x, y) not in cells)
    return GridSpec(width, height, walls)


def snapshot_field(records, field: str = "N") -> dict:
    """Per-state scalar from snapshot records keyed by state id."""
    if field not in SNAPSHOT_FIELDS:
        raise ValueError(f"field must be one of {SNAPSHOT_FIELDS}")
    out = {}
    for r in records:
        if field == "N":
            v = r["N"]
        elif field == "d_e":
            v = r["d_e"]
        elif field == "degree":
            v = len(r["neighbors"])
        else:
            v = 1.0 / np.sqrt(max(r["N"], 1) * r["d_e"])
        out[int(r["id"])] = float(v)
    return out


def emit_snapshot_heatmap(snapshot_path, out_path, field: str = "N",
                          grid: Optional[GridSpec] = None) -> Path:
    """Render a tracker snapshot written with cell coordinates.

    With ``grid`` given, state ids index its free cells; otherwise the grid is
    reconstructed from the snapshot coordinates.
    """
    records = read_snapshot(snapshot_path)
    if not records:
        raise ValueError(f"empty snapshot: {snapshot_path}")
    values = snapshot_field(records, field)
    if grid is None:
        if any("x" not in r for r in records):
            raise ValueError("snapshot lacks cell coordinates; pass a layout")
        grid = snapshot_grid(records)
        index = {c: i for i, c in enumerate(grid.free_cells())}
        by_id = {int(r["id"]): (int(r["x"]), int(r["y"])) for r in records}
        values = {index[by_id[s]]: v for s, v in values.items()}
    return emit_heatmap(grid, values, out_path)
