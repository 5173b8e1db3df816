"""Trajectory interchange files.

One trajectory is a CSV with header ``frame,t,x,y,visible,object_count``
(plus ``x2,y2`` columns when a second object is tracked, as for the double
pendulum) and a JSON sidecar of the same basename carrying unit metadata and
an optional pivot in the trajectory's native coordinates.  A directory of
such pairs is a batch.

Floats are written with ``repr`` so write -> read -> write round-trips
byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .types import ExperimentKind, Trajectory

BASE_COLUMNS = ["frame", "t", "x", "y", "visible", "object_count"]
SECONDARY_COLUMNS = ["x2", "y2"]


@dataclass(frozen=True)
class TrajectoryFile:
    name: str
    trajectory: Trajectory
    pivot: tuple[float, float] | None  # native coordinates


def sidecar_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".json")


def write_trajectory(traj: Trajectory, csv_path, pivot=None) -> None:
    """Write the CSV plus its metadata sidecar; ``pivot`` is in the
    trajectory's native coordinates."""
    csv_path = Path(csv_path)
    has_secondary = traj.x2 is not None
    columns = BASE_COLUMNS + (SECONDARY_COLUMNS if has_secondary else [])
    lines = [",".join(columns)]
    for i in range(len(traj)):
        row = [str(i), repr(float(traj.t[i])), repr(float(traj.x[i])),
               repr(float(traj.y[i])), str(int(traj.visible[i])),
               str(int(traj.object_count[i]))]
        if has_secondary:
            row += [repr(float(traj.x2[i])), repr(float(traj.y2[i]))]
        lines.append(",".join(row))
    csv_path.write_text("\n".join(lines) + "\n")

    meta = {
        "unit": traj.unit,
        "y_axis": traj.y_axis,
        "fps": traj.fps,
        "experiment": traj.experiment.value,
        "pixels_per_meter": traj.pixels_per_meter,
        "pivot": None if pivot is None else [float(pivot[0]), float(pivot[1])],
    }
    sidecar_path(csv_path).write_text(json.dumps(meta, indent=2) + "\n")


def _parse_float(token: str, row: int, column: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ValidationError(f"row {row}: column {column!r} is not a number: "
                              f"{token!r}") from None


def _parse_flag(token: str, row: int, column: str) -> int:
    if token not in ("0", "1"):
        raise ValidationError(f"row {row}: column {column!r} must be 0 or 1, "
                              f"got {token!r}")
    return int(token)


def read_trajectory(csv_path) -> TrajectoryFile:
    """Parse and validate one CSV + sidecar pair.

    Raises :class:`ValidationError` naming the offending row/field on any
    schema violation, including nonmonotone timestamps.
    """
    csv_path = Path(csv_path)
    if not csv_path.exists():
        raise ValidationError(f"no such trajectory file: {csv_path}")
    meta_path = sidecar_path(csv_path)
    if not meta_path.exists():
        raise ValidationError(f"missing sidecar {meta_path.name} for "
                              f"{csv_path.name}")
    try:
        meta = json.loads(meta_path.read_text())
    except json.JSONDecodeError as e:
        raise ValidationError(f"{meta_path.name}: invalid JSON: {e}") from None

    lines = [ln for ln in csv_path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValidationError(f"{csv_path.name}: empty file")
    header = [h.strip() for h in lines[0].split(",")]
    if header == BASE_COLUMNS:
        has_secondary = False
    elif header == BASE_COLUMNS + SECONDARY_COLUMNS:
        has_secondary = True
    else:
        raise ValidationError(f"{csv_path.name}: bad header {header}, expected "
                              f"{BASE_COLUMNS} (optionally with "
                              f"{SECONDARY_COLUMNS})")

    n_cols = len(header)
    cols: dict[str, list] = {name: [] for name in header}
    for row_no, line in enumerate(lines[1:], start=1):
        tokens = [tok.strip() for tok in line.split(",")]
        if len(tokens) != n_cols:
            raise ValidationError(f"{csv_path.name} row {row_no}: expected "
                                  f"{n_cols} fields, got {len(tokens)}")
        cols["frame"].append(tokens[0])
        cols["t"].append(_parse_float(tokens[1], row_no, "t"))
        cols["x"].append(_parse_float(tokens[2], row_no, "x"))
        cols["y"].append(_parse_float(tokens[3], row_no, "y"))
        cols["visible"].append(_parse_flag(tokens[4], row_no, "visible"))
        count = tokens[5]
        if not count.isdigit():
            raise ValidationError(f"{csv_path.name} row {row_no}: "
                                  f"object_count must be a nonnegative "
                                  f"integer, got {count!r}")
        cols["object_count"].append(int(count))
        if has_secondary:
            cols["x2"].append(_parse_float(tokens[6], row_no, "x2"))
            cols["y2"].append(_parse_float(tokens[7], row_no, "y2"))

    t = np.asarray(cols["t"])
    bad = np.where(np.diff(t) <= 0)[0]
    if bad.size:
        raise ValidationError(f"{csv_path.name} row {int(bad[0]) + 2}: "
                              "timestamps must be strictly increasing")

    for key in ("unit", "y_axis", "fps", "experiment"):
        if key not in meta:
            raise ValidationError(f"{meta_path.name}: missing field {key!r}")
    try:
        experiment = ExperimentKind(meta["experiment"])
    except ValueError:
        raise ValidationError(f"{meta_path.name}: unknown experiment "
                              f"{meta['experiment']!r}") from None

    traj = Trajectory(
        t=t, x=np.asarray(cols["x"]), y=np.asarray(cols["y"]),
        visible=np.asarray(cols["visible"], dtype=bool),
        object_count=np.asarray(cols["object_count"]),
        fps=float(meta["fps"]), experiment=experiment,
        unit=meta["unit"], y_axis=meta["y_axis"],
        pixels_per_meter=meta.get("pixels_per_meter"),
        x2=np.asarray(cols["x2"]) if has_secondary else None,
        y2=np.asarray(cols["y2"]) if has_secondary else None,
    )
    pivot = meta.get("pivot")
    return TrajectoryFile(name=csv_path.stem, trajectory=traj,
                          pivot=None if pivot is None else tuple(pivot))


def read_batch(directory) -> list[TrajectoryFile]:
    """All trajectory files in a directory, sorted by filename."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ValidationError(f"not a directory: {directory}")
    paths = sorted(directory.glob("*.csv"))
    if not paths:
        raise ValidationError(f"no trajectory CSV files in {directory}")
    return [read_trajectory(p) for p in paths]
