"""Leaderboard-style tables and scatter data from stored run documents.

Per experiment, one table row per source label: Discard Rate, Dynamical
score, Physical Invariance score, then the experiment's per-invariant
conservation columns (ball experiments and the holonomic pendulum define
them; the other pendulums report aggregates only).
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ValidationError
from .invariants import InvariantKind
from .types import ExperimentKind

#: Per-invariant table columns, in print order, per experiment.
TABLE_COMPONENTS = {
    ExperimentKind.FALLING_BALL: [InvariantKind.ENERGY_PER_MASS,
                                  InvariantKind.VERTICAL_ACCELERATION,
                                  InvariantKind.HORIZONTAL_VELOCITY],
    ExperimentKind.BOUNCING_BALL: [InvariantKind.ENERGY_PER_MASS,
                                   InvariantKind.VERTICAL_ACCELERATION,
                                   InvariantKind.HORIZONTAL_VELOCITY],
    ExperimentKind.PROJECTILE: [InvariantKind.ENERGY_PER_MASS,
                                InvariantKind.VERTICAL_ACCELERATION,
                                InvariantKind.HORIZONTAL_VELOCITY],
    ExperimentKind.HOLONOMIC_PENDULUM: [InvariantKind.PENDULUM_ENERGY,
                                        InvariantKind.PENDULUM_PERIOD,
                                        InvariantKind.PENDULUM_LENGTH],
    ExperimentKind.NON_HOLONOMIC_PENDULUM: [],
    ExperimentKind.DOUBLE_PENDULUM: [],
}

COMPONENT_LABELS = {
    InvariantKind.ENERGY_PER_MASS: "Energy Conservation",
    InvariantKind.VERTICAL_ACCELERATION: "Acceleration Conservation",
    InvariantKind.HORIZONTAL_VELOCITY: "Horizontal Momentum Conservation",
    InvariantKind.PENDULUM_ENERGY: "Energy Conservation",
    InvariantKind.PENDULUM_PERIOD: "Period Conservation",
    InvariantKind.PENDULUM_LENGTH: "Distance Conservation",
}

BASE_COLUMNS = ["Source", "Discard Rate", "Dynamical Score",
                "Physical Invariance Score"]


def table_columns(experiment: ExperimentKind) -> list[str]:
    return BASE_COLUMNS + [COMPONENT_LABELS[c]
                           for c in TABLE_COMPONENTS[experiment]]


def experiment_table(experiment: ExperimentKind, docs: list[dict]):
    """(header, rows) for every run document of one experiment."""
    header = table_columns(experiment)
    rows = []
    for doc in docs:
        summary = doc["summary"]
        row = [doc["manifest"]["source_label"],
               f"{summary['discard_rate']:.3f}",
               f"{summary['mean_dynamical_score']:.3f}",
               f"{summary['mean_physical_invariance']:.3f}"]
        for comp in TABLE_COMPONENTS[experiment]:
            value = summary["mean_components"].get(comp.value)
            row.append("-" if value is None else f"{value:.3f}")
        rows.append(row)
    return header, rows


def render_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(row) for row in rows]
    return "\n".join(lines) + "\n"


def render_text(header, rows) -> str:
    widths = [max(len(str(c)) for c in col)
              for col in zip(header, *rows)] if rows else [len(h) for h in header]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*row) for row in rows]
    return "\n".join(lines) + "\n"


def scatter_rows(docs: list[dict]):
    """One (source, mean invariance, mean dynamical) point per run."""
    return [(doc["manifest"]["source_label"],
             doc["summary"]["mean_physical_invariance"],
             doc["summary"]["mean_dynamical_score"]) for doc in docs]


def render_scatter_csv(points) -> str:
    lines = ["source,mean_physical_invariance,mean_dynamical_score"]
    lines += [f"{label},{inv!r},{dyn!r}" for label, inv, dyn in points]
    return "\n".join(lines) + "\n"


def group_by_experiment(docs: list[dict]) -> dict:
    groups: dict[ExperimentKind, list[dict]] = {}
    for doc in docs:
        try:
            kind = ExperimentKind(doc["manifest"]["experiment"])
        except (KeyError, ValueError) as e:
            raise ValidationError(f"malformed run document: {e}") from None
        groups.setdefault(kind, []).append(doc)
    return groups


def write_artifacts(docs: list[dict], out_dir) -> list[Path]:
    """Emit per-experiment tables (CSV + text), scatter CSV and the combined
    per-trajectory JSON; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    groups = group_by_experiment(docs)
    for kind, group in groups.items():
        header, rows = experiment_table(kind, group)
        for suffix, renderer in (("csv", render_csv), ("txt", render_text)):
            path = out_dir / f"table_{kind.value}.{suffix}"
            path.write_text(renderer(header, rows))
            written.append(path)
    scatter = out_dir / "scatter.csv"
    scatter.write_text(render_scatter_csv(scatter_rows(docs)))
    written.append(scatter)
    combined = out_dir / "results.json"
    combined.write_text(json.dumps(docs, indent=2) + "\n")
    written.append(combined)
    return written
