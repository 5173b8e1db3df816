"""Batch orchestration: gate -> invariance scoring -> PINN fit -> report rows.

A run is described by a JSON manifest; every unset field takes the documented
default and the fully resolved manifest is echoed into the results document
for provenance.  Within a batch, trajectories are independent; the
``PHYSBENCH_WORKERS`` environment variable (or the ``workers`` argument)
enables process parallelism without changing any result.
"""

from __future__ import annotations

import dataclasses
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynscore import PinnConfig, fit_trajectory
from .errors import PhysBenchError, ValidationError
from .gate import DISCARD_REASONS, GateConfig, GateReason, discard_rate, gate
from .invariants import ScoreConfig, physical_invariance
from .trajio import TrajectoryFile
from .types import ExperimentKind, ExperimentSpec, KinematicsConfig, Trajectory


def _dataclass_from(cls, data: dict, context: str):
    if not isinstance(data, dict):
        raise ValidationError(f"{context} must be a JSON object")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValidationError(f"{context}: unknown fields {sorted(unknown)}")
    coerced = dict(data)
    for key in ("pivot", "offset", "origin_px"):
        if isinstance(coerced.get(key), list):
            coerced[key] = tuple(coerced[key])
    return cls(**coerced)


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to score one batch reproducibly."""

    run_id: str
    experiment: ExperimentKind
    source_label: str = "unlabeled"
    reference: bool = False
    experiment_spec: ExperimentSpec = None
    kinematics: KinematicsConfig = field(default_factory=KinematicsConfig)
    score: ScoreConfig = field(default_factory=ScoreConfig)
    pinn: PinnConfig = field(default_factory=PinnConfig)
    gate: GateConfig = field(default_factory=GateConfig)

    def __post_init__(self):
        if self.experiment_spec is None:
            object.__setattr__(self, "experiment_spec",
                               ExperimentSpec(kind=self.experiment))
        if self.experiment_spec.kind != self.experiment:
            raise ValidationError("experiment_spec.kind must match the "
                                  "manifest experiment")

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        data = dict(data)
        for key in ("run_id", "experiment"):
            if key not in data:
                raise ValidationError(f"manifest: missing field {key!r}")
        try:
            experiment = ExperimentKind(data.pop("experiment"))
        except ValueError as e:
            raise ValidationError(f"manifest: {e}") from None
        known = {"run_id", "source_label", "reference", "experiment_spec",
                 "kinematics", "score", "pinn", "gate"}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"manifest: unknown fields {sorted(unknown)}")
        spec = _dataclass_from(ExperimentSpec,
                               {"kind": experiment,
                                **data.get("experiment_spec", {})},
                               "experiment_spec")
        return cls(
            run_id=str(data["run_id"]),
            experiment=experiment,
            source_label=str(data.get("source_label", "unlabeled")),
            reference=bool(data.get("reference", False)),
            experiment_spec=spec,
            kinematics=_dataclass_from(KinematicsConfig,
                                       data.get("kinematics", {}), "kinematics"),
            score=_dataclass_from(ScoreConfig, data.get("score", {}), "score"),
            pinn=_dataclass_from(PinnConfig, data.get("pinn", {}), "pinn"),
            gate=_dataclass_from(GateConfig, data.get("gate", {}), "gate"),
        )

    @classmethod
    def from_json(cls, path) -> "RunManifest":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise ValidationError(f"no such manifest: {path}") from None
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path.name}: invalid JSON: {e}") from None
        return cls.from_dict(data)

    def resolved(self) -> dict:
        """Fully-defaulted manifest for provenance echoing."""
        out = dataclasses.asdict(self)
        out["experiment"] = self.experiment.value
        out["experiment_spec"]["kind"] = self.experiment.value
        return out

    def validate(self) -> None:
        self.experiment_spec.validate()
        self.kinematics.validate()
        self.score.validate()
        self.pinn.validate()
        self.gate.validate()


@dataclass(frozen=True)
class TrajectoryRecord:
    name: str
    kept: bool
    gate_reason: str
    physical_invariance: float
    dynamical_score: float
    invariance_components: dict | None = None
    nmse: float | None = None
    nmse_per_coordinate: tuple | None = None
    error: str | None = None


@dataclass(frozen=True)
class ScoreReport:
    manifest: dict  # resolved manifest
    records: list
    discard_rate: float
    reason_counts: dict  # reason value -> count
    mean_physical_invariance: float
    mean_dynamical_score: float
    mean_components: dict  # component -> batch mean, zeros for discarded

    def to_dict(self) -> dict:
        return {
            "manifest": self.manifest,
            "summary": {
                "total": len(self.records),
                "discard_rate": self.discard_rate,
                "reason_counts": self.reason_counts,
                "mean_physical_invariance": self.mean_physical_invariance,
                "mean_dynamical_score": self.mean_dynamical_score,
                "mean_components": self.mean_components,
            },
            "trajectories": [dataclasses.asdict(r) for r in self.records],
        }


def _interpolate_invisible(traj: Trajectory) -> Trajectory:
    """Linearly fill positions of invisible samples (gate already passed)."""
    if np.all(traj.visible):
        return traj
    ok = traj.visible
    t = traj.t

    def fill(col):
        col = np.asarray(col, dtype=float).copy()
        col[~ok] = np.interp(t[~ok], t[ok], col[ok])
        return col

    fixed = traj.replace_positions(
        fill(traj.x), fill(traj.y),
        fill(traj.x2) if traj.x2 is not None else None,
        fill(traj.y2) if traj.y2 is not None else None)
    return Trajectory(
        t=fixed.t, x=fixed.x, y=fixed.y,
        visible=np.ones(len(fixed), dtype=bool),
        object_count=np.maximum(fixed.object_count, 1),
        fps=fixed.fps, experiment=fixed.experiment, unit=fixed.unit,
        y_axis=fixed.y_axis, pixels_per_meter=fixed.pixels_per_meter,
        x2=fixed.x2, y2=fixed.y2)


def _spec_with_pivot(manifest: RunManifest, item: TrajectoryFile) -> ExperimentSpec:
    """Per-trajectory sidecar pivot (native coords) wins over the manifest."""
    spec = manifest.experiment_spec
    if item.pivot is None:
        return spec
    pivot = item.trajectory.metric_point(*item.pivot)
    return dataclasses.replace(spec, pivot=(float(pivot[0]), float(pivot[1])))


def score_one(manifest: RunManifest, item: TrajectoryFile,
              index: int) -> TrajectoryRecord:
    """Gate and, if kept, score one trajectory; never raises on scoring
    errors (they are recorded on the row with zero scores)."""
    traj = item.trajectory
    verdict = gate(traj, manifest.gate)
    if not verdict.kept:
        return TrajectoryRecord(
            name=item.name, kept=False, gate_reason=verdict.reason.value,
            physical_invariance=0.0, dynamical_score=0.0)

    spec = _spec_with_pivot(manifest, item)
    pinn_cfg = dataclasses.replace(manifest.pinn,
                                   seed=manifest.pinn.seed + index)
    try:
        prepared = _interpolate_invisible(traj)
        inv = physical_invariance(prepared, spec, manifest.score,
                                  manifest.kinematics,
                                  reference=manifest.reference)
        fit = fit_trajectory(prepared, spec, pinn_cfg)
    except PhysBenchError as e:
        return TrajectoryRecord(
            name=item.name, kept=True, gate_reason=verdict.reason.value,
            physical_invariance=0.0, dynamical_score=0.0,
            error=f"{type(e).__name__}: {e}")
    return TrajectoryRecord(
        name=item.name, kept=True, gate_reason=verdict.reason.value,
        physical_invariance=inv.aggregate,
        dynamical_score=fit.dynamical_score,
        invariance_components={k.value: v for k, v in inv.components.items()},
        nmse=fit.nmse, nmse_per_coordinate=tuple(fit.nmse_per_coordinate))


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("PHYSBENCH_WORKERS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise ValidationError(f"PHYSBENCH_WORKERS must be an integer, "
                              f"got {env!r}") from None


def run_batch(manifest: RunManifest, items: list,
              workers: int | None = None) -> ScoreReport:
    """Score a batch of trajectories in input order.

    Per-trajectory failures are recorded, not raised; means include zeros for
    discarded (and errored) rows so a batch is never silently truncated.
    """
    manifest.validate()
    if not items:
        raise ValidationError("empty batch")
    for item in items:
        if item.trajectory.experiment != manifest.experiment:
            raise ValidationError(
                f"{item.name}: trajectory experiment "
                f"{item.trajectory.experiment.value} does not match manifest "
                f"{manifest.experiment.value}")

    n_workers = _worker_count(workers)
    if n_workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            records = list(pool.map(score_one, [manifest] * len(items), items,
                                    range(len(items))))
    else:
        records = [score_one(manifest, item, i)
                   for i, item in enumerate(items)]

    verdicts = [gate(item.trajectory, manifest.gate) for item in items]
    summary = discard_rate(verdicts)

    component_keys: list[str] = []
    for r in records:
        if r.invariance_components:
            component_keys = list(r.invariance_components)
            break
    mean_components = {
        key: float(np.mean([
            r.invariance_components.get(key, 0.0)
            if r.invariance_components else 0.0 for r in records]))
        for key in component_keys}

    return ScoreReport(
        manifest=manifest.resolved(),
        records=records,
        discard_rate=summary.rate,
        reason_counts={reason.value: summary.counts[reason]
                       for reason in DISCARD_REASONS},
        mean_physical_invariance=float(
            np.mean([r.physical_invariance for r in records])),
        mean_dynamical_score=float(
            np.mean([r.dynamical_score for r in records])),
        mean_components=mean_components,
    )


def write_report(report: ScoreReport, results_dir) -> Path:
    """Persist one run document; the store is append-only by run id."""
    results_dir = Path(results_dir)
    results_dir.mkdir(parents=True, exist_ok=True)
    out = results_dir / f"{report.manifest['run_id']}.json"
    if out.exists():
        raise ValidationError(f"run id {report.manifest['run_id']!r} already "
                              f"recorded at {out} (results are append-only)")
    out.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    return out


def load_reports(results_dir) -> list[dict]:
    results_dir = Path(results_dir)
    if not results_dir.is_dir():
        raise ValidationError(f"not a directory: {results_dir}")
    docs = []
    for path in sorted(results_dir.glob("*.json")):
        try:
            docs.append(json.loads(path.read_text()))
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path.name}: invalid JSON: {e}") from None
    if not docs:
        raise ValidationError(f"no run documents in {results_dir}")
    return docs
