"""Command-line interface.

Subcommands:

* ``simulate`` generates trajectory batches from a simulation spec file,
  optionally corrupting them;
* ``gate`` prints discard verdicts for a batch;
* ``score`` runs the full gate -> invariance -> PINN pipeline and stores a
  run document;
* ``report`` turns stored run documents into tables and scatter data.

Any validation problem exits with status 2 and a message on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import bench, report as report_mod, trajio
from .errors import PhysBenchError, ValidationError
from .gate import discard_rate, gate
from .simulate import PENDULUM_SIM_KINDS, SimSpec, corrupt, corruption_from_dict, native_pivot, simulate
from .types import ExperimentKind


def _load_json(path: str, what: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValidationError(f"no such {what}: {path}") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON: {e}") from None


def _build_sim_specs(data: dict) -> list[SimSpec]:
    data = dict(data)
    count = int(data.pop("count", 1))
    variants = data.pop("variants", None)
    if "kind" not in data:
        raise ValidationError("simulation spec needs a 'kind' field")
    try:
        data["kind"] = ExperimentKind(data["kind"])
    except ValueError as e:
        raise ValidationError(str(e)) from None
    base = bench._dataclass_from(SimSpec, data, "simulation spec")
    if variants is not None:
        if not isinstance(variants, list):
            raise ValidationError("'variants' must be a list of field overrides")
        specs = []
        for i, overrides in enumerate(variants):
            merged = dataclasses.asdict(base)
            merged.update(overrides)
            merged["kind"] = base.kind
            merged["seed"] = overrides.get("seed", base.seed + i)
            specs.append(bench._dataclass_from(SimSpec, merged,
                                               f"variants[{i}]"))
        return specs
    return [dataclasses.replace(base, seed=base.seed + i) for i in range(count)]


def cmd_simulate(args) -> int:
    specs = _build_sim_specs(_load_json(args.spec, "simulation spec"))
    corruption = None
    if args.corrupt:
        text = args.corrupt
        if Path(text).exists():
            text = Path(text).read_text()
        try:
            corruption = corruption_from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise ValidationError(f"--corrupt: invalid JSON: {e}") from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, spec in enumerate(specs):
        traj = simulate(spec)
        if corruption is not None:
            traj = corrupt(traj, corruption, seed=spec.seed)
        pivot = native_pivot(spec) if spec.kind in PENDULUM_SIM_KINDS else None
        trajio.write_trajectory(traj, out / f"traj_{i:03d}.csv", pivot=pivot)
    print(f"wrote {len(specs)} trajectories to {out}")
    return 0


def cmd_gate(args) -> int:
    manifest = bench.RunManifest.from_json(args.manifest)
    manifest.validate()
    items = trajio.read_batch(args.input)
    verdicts = [gate(item.trajectory, manifest.gate) for item in items]
    for item, verdict in zip(items, verdicts):
        print(f"{item.name}: {verdict.reason.value}")
    summary = discard_rate(verdicts)
    counts = " ".join(f"{r.value}={summary.counts[r]}" for r in summary.counts)
    print(f"discard rate: {summary.rate:.3f} ({counts})")
    return 0


def cmd_score(args) -> int:
    manifest = bench.RunManifest.from_json(args.manifest)
    items = trajio.read_batch(args.input)
    result = bench.run_batch(manifest, items, workers=args.workers)
    path = bench.write_report(result, args.out)
    print(f"run {manifest.run_id}: {len(result.records)} trajectories")
    print(f"discard rate: {result.discard_rate:.3f}")
    print(f"mean Physical Invariance: {result.mean_physical_invariance:.3f}")
    print(f"mean Dynamical score: {result.mean_dynamical_score:.3f}")
    print(f"stored {path}")
    return 0


def cmd_report(args) -> int:
    docs = bench.load_reports(args.results)
    out_dir = Path(args.out) if args.out else Path(args.results) / "report"
    report_mod.write_artifacts(docs, out_dir)
    if args.format == "json":
        print(json.dumps(docs, indent=2))
    else:
        renderer = (report_mod.render_csv if args.format == "csv"
                    else report_mod.render_text)
        for kind, group in report_mod.group_by_experiment(docs).items():
            header, rows = report_mod.experiment_table(kind, group)
            print(f"# {kind.value}")
            print(renderer(header, rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="physbench",
        description="Score how well 2D trajectories obey Newtonian physics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate simulated trajectory batches")
    p.add_argument("--spec", required=True, help="simulation spec JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--corrupt", help="corruption JSON (inline or a file path)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gate", help="print discard verdicts for a batch")
    p.add_argument("--manifest", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("score", help="gate and score a trajectory batch")
    p.add_argument("--manifest", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="results directory")
    p.add_argument("--workers", type=int, default=None,
                   help="process count (default: PHYSBENCH_WORKERS or 1)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("report", help="render tables from stored results")
    p.add_argument("--results", required=True)
    p.add_argument("--format", choices=("csv", "text", "json"), default="text")
    p.add_argument("--out", help="artifact directory (default <results>/report)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PhysBenchError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
