"""CSV / JSON input and atomic output."""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .dynsys import Trajectory


def atomic_write(path: str | os.PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def trajectory_to_csv(traj: Trajectory, digits: int = 6) -> str:
    lines = [",".join(traj.variable_names)]
    fmt = f"{{:.{digits}g}}"
    for row in traj.samples:
        lines.append(",".join(fmt.format(v) for v in row))
    return "\n".join(lines) + "\n"


def read_trajectory_csv(path: str | os.PathLike, dt: float = 1.0) -> Trajectory:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise ValueError(f"{path}: empty CSV")
        rows = [[float(v) for v in r] for r in reader if r]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return Trajectory(np.array(rows), dt, 0, tuple(h.strip() for h in header))


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
