"""Acceptance suite: one test per criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v`` to get a pass/fail line per
criterion.  The reference batches train the per-trajectory networks at the
desk-scale 20k iteration default, so this module dominates the suite's
runtime (several minutes; trajectories score on two worker processes).
"""

import json
import math
import os

import numpy as np
import pytest

from physbench.bench import RunManifest, run_batch
from physbench.dynscore import PinnConfig, TaylorMlp, build_problem, dynamical_score, nmse
from physbench.gate import GateReason, GateVerdict, discard_rate
from physbench.invariants import InvariantKind, aggregate_invariance
from physbench.kinematics import (
    central_difference,
    regression_window_bounds,
    savitzky_golay,
    window_regression_slope,
)
from physbench.simulate import (
    AdditiveNoise,
    Freeze,
    GravityScale,
    Levitate,
    SimSpec,
    corrupt,
    double_pendulum_deriv,
    double_pendulum_energy,
    native_pivot,
    pendulum_deriv,
    pendulum_energy,
    rk4_step,
    simulate,
    simulate_with_events,
)
from physbench.trajio import TrajectoryFile
from physbench.types import ExperimentKind

G = 9.81
WORKERS = min(2, os.cpu_count() or 1)
K = ExperimentKind

# --- reference batches: 10 noiseless simulations per kind at 120 fps --------

REFERENCE_RECIPES = {
    K.FALLING_BALL: dict(
        sims=[dict(y0=1.8 + 0.12 * i, duration=0.7) for i in range(10)],
        spec={}),
    K.BOUNCING_BALL: dict(
        sims=[dict(y0=0.0, vy0=3.2 + 0.12 * i, restitution=0.8, duration=1.5)
              for i in range(10)],
        spec={}),
    K.PROJECTILE: dict(
        sims=[dict(y0=1.0, vx0=1.1 + 0.06 * i, vy0=2.8 + 0.1 * i,
                   duration=1.0) for i in range(10)],
        spec={}),
    K.HOLONOMIC_PENDULUM: dict(
        sims=[dict(theta0=0.3 + 0.02 * i, length_1=0.35, pivot=(0.0, 1.0),
                   duration=4.0) for i in range(10)],
        spec={"pivot": [0.0, 1.0], "length": 0.35}),
    K.NON_HOLONOMIC_PENDULUM: dict(
        sims=[dict(theta0=0.28 + 0.02 * i, length_1=0.35, pivot=(0.0, 1.0),
                   duration=3.0) for i in range(10)],
        spec={"pivot": [0.0, 1.0], "length": 0.35}),
    K.DOUBLE_PENDULUM: dict(
        sims=[dict(theta0=0.26 + 0.02 * i, theta2_0=0.45 + 0.025 * i,
                   length_1=0.3, length_2=0.3, pivot=(0.0, 1.0), duration=3.0)
              for i in range(10)],
        spec={"pivot": [0.0, 1.0], "length_1": 0.3, "length_2": 0.3}),
}


def reference_manifest(kind: K) -> RunManifest:
    return RunManifest.from_dict({
        "run_id": f"ref-{kind.value}",
        "experiment": kind.value,
        "source_label": "simulated-reference",
        "reference": True,
        "experiment_spec": REFERENCE_RECIPES[kind]["spec"],
        "gate": {"frame_diagonal": 3.0},
    })


def reference_items(kind: K) -> list:
    items = []
    for i, overrides in enumerate(REFERENCE_RECIPES[kind]["sims"]):
        sim = SimSpec(kind=kind, seed=i, **overrides)
        pivot = native_pivot(sim) if "pivot" in overrides else None
        items.append(TrajectoryFile(name=f"traj_{i:03d}",
                                    trajectory=simulate(sim), pivot=pivot))
    return items


@pytest.fixture(scope="module")
def reference_reports():
    return {kind: run_batch(reference_manifest(kind), reference_items(kind),
                            workers=WORKERS)
            for kind in REFERENCE_RECIPES}


# --- criterion 1: aggregation identity vs the published real-world rows -----


@pytest.mark.parametrize("components,expected", [
    pytest.param((0.993, 0.946, 0.994), 0.977, id="falling-ball-row"),
    pytest.param((0.999, 0.882, 0.936), 0.939, id="holonomic-pendulum-row"),
])
def test_criterion_1_aggregation_identity(components, expected):
    assert abs(aggregate_invariance(components) - expected) <= 5e-4


# --- criterion 2: reference-quality oracle ----------------------------------


@pytest.mark.parametrize("kind", list(REFERENCE_RECIPES), ids=lambda k: k.value)
def test_criterion_2_reference_band(reference_reports, kind):
    report = reference_reports[kind]
    assert report.discard_rate == 0.0
    for record in report.records:
        assert record.error is None, f"{record.name}: {record.error}"
    assert report.mean_physical_invariance >= 0.90
    dyn_floor = 0.95 if kind is K.FALLING_BALL else 0.90
    assert report.mean_dynamical_score >= dyn_floor


# --- criterion 3: unphysical corruptions must be caught ---------------------

SENSITIVITY_SEEDS = 10
SENSITIVITY_NOISE = 5e-4  # meters of tracking jitter


@pytest.fixture(scope="module")
def sensitivity_reports():
    base = simulate(SimSpec(kind=K.FALLING_BALL, y0=20.0, duration=2.0))
    variants = {
        "clean": base,
        "levitate": corrupt(base, Levitate(start_t=0.3, hold_duration=1.3)),
        "gravity_half": corrupt(base, GravityScale(0.5)),
    }
    reports = {}
    for label, traj in variants.items():
        items = [TrajectoryFile(
            name=f"seed_{seed}",
            trajectory=corrupt(traj, AdditiveNoise(SENSITIVITY_NOISE),
                               seed=seed),
            pivot=None) for seed in range(SENSITIVITY_SEEDS)]
        manifest = RunManifest.from_dict({
            "run_id": f"sens-{label}",
            "experiment": K.FALLING_BALL.value,
            "source_label": label,
            "gate": {"frame_diagonal": 25.0},
        })
        reports[label] = run_batch(manifest, items, workers=WORKERS)
    return reports


def _mean_acceleration_score(report):
    return np.mean([r.invariance_components["vertical_acceleration"]
                    for r in report.records])


@pytest.mark.parametrize("corruption", ["levitate", "gravity_half"])
def test_criterion_3_acceleration_score_drop(sensitivity_reports, corruption):
    clean = _mean_acceleration_score(sensitivity_reports["clean"])
    corrupted = _mean_acceleration_score(sensitivity_reports[corruption])
    assert clean - corrupted >= 0.2


@pytest.mark.parametrize("corruption", ["levitate", "gravity_half"])
def test_criterion_3_dynamical_score_drop(sensitivity_reports, corruption):
    clean = sensitivity_reports["clean"].mean_dynamical_score
    corrupted = sensitivity_reports[corruption].mean_dynamical_score
    assert clean - corrupted >= 0.3


# --- criterion 4: kinematics exactness --------------------------------------


def test_criterion_4_central_difference_exact_on_quadratics():
    t = np.arange(40) * (1.0 / 120.0)
    d = central_difference(3.0 * t ** 2 - 2.0 * t + 0.5, t)
    expected = 6.0 * t - 2.0
    err = np.abs(d[1:-1] - expected[1:-1]) / np.abs(expected[1:-1])
    assert np.max(err) <= 1e-9


def test_criterion_4_savitzky_golay_exact_on_cubics():
    t = np.linspace(0.1, 2.1, 60)
    x = 0.7 * t ** 3 - 1.1 * t ** 2 + 0.3 * t + 2.0
    out = savitzky_golay(x, 7, 3)
    assert np.max(np.abs(out - x) / np.abs(x)) <= 1e-9


def test_criterion_4_regression_matches_normal_equation_oracle():
    rng = np.random.default_rng(42)
    t = np.arange(60) * 0.02
    x = np.sin(2.0 * t) + rng.normal(0, 0.05, 60)
    got = window_regression_slope(x, t, 7)
    for i in range(60):
        lo, hi = regression_window_bounds(i, 60, 7)
        A = np.column_stack([t[lo:hi], np.ones(hi - lo)])
        oracle = np.linalg.lstsq(A, x[lo:hi], rcond=None)[0][0]
        assert abs(got[i] - oracle) <= 1e-9


# --- criterion 5: network and metric correctness -----------------------------


def test_criterion_5_network_derivatives_match_finite_differences():
    net = TaylorMlp(1, hidden_layers=2, width=20)
    theta = net.init_params(123)
    tau = np.linspace(0.05, 0.95, 11)
    (_, u1, u2), _ = net.forward_taylor(theta, tau)
    h = 1e-4
    up, _ = net.forward(theta, tau + h)
    um, _ = net.forward(theta, tau - h)
    uc, _ = net.forward(theta, tau)
    fd1 = (up - um) / (2 * h)
    fd2 = (up - 2 * uc + um) / h ** 2
    assert np.max(np.abs(u1 - fd1) / np.maximum(np.abs(fd1), 1e-6)) <= 1e-5
    assert np.max(np.abs(u2 - fd2) / np.maximum(np.abs(fd2), 1e-6)) <= 1e-5


def test_criterion_5_loss_gradient_matches_central_differences():
    rng = np.random.default_rng(7)
    t = np.arange(50) / 120.0
    y = 2.0 - 0.5 * G * t ** 2
    problem = build_problem(t, y, K.FALLING_BALL, {"g": G},
                            PinnConfig(collocation_points=40))
    theta = problem.net.init_params(3)
    _, _, _, grad = problem.loss_and_grad(theta)
    for i in rng.choice(len(theta), 10, replace=False):
        h = 1e-6 * max(1.0, abs(theta[i]))
        tp, tm = theta.copy(), theta.copy()
        tp[i] += h
        tm[i] -= h
        fd = (problem.loss_and_grad(tp)[0] - problem.loss_and_grad(tm)[0]) / (2 * h)
        assert abs(grad[i] - fd) / max(abs(fd), 1e-8) <= 1e-4


def test_criterion_5_nmse_and_score_edge_values():
    truth = np.array([0.4, 1.7, -0.3, 2.2, 0.9])
    assert nmse(np.full_like(truth, truth.mean()), truth) == 1.0
    assert nmse(truth, truth) == 0.0
    assert dynamical_score(nmse(truth, truth)) == 1.0


# --- criterion 6: simulator fidelity -----------------------------------------


def test_criterion_6_pendulum_energy_drift():
    deriv = pendulum_deriv(G, 0.5, 0.0)
    s = np.array([0.6, 0.0])
    e0 = pendulum_energy(s[0], s[1], G, 0.5)
    for _ in range(10_000):  # 10 s at dt = 1e-3
        s = rk4_step(s, deriv, 1e-3)
    assert abs(pendulum_energy(s[0], s[1], G, 0.5) - e0) / e0 < 1e-6


def test_criterion_6_double_pendulum_energy_drift():
    l1, l2, mu = 0.3, 0.25, 1.0
    deriv = double_pendulum_deriv(G, l1, l2, mu)
    s = np.array([0.5, 0.0, 1.0, 0.0])
    e0 = double_pendulum_energy(s[0], s[1], s[2], s[3], G, l1, l2, mu)
    for _ in range(10_000):
        s = rk4_step(s, deriv, 1e-3)
    e1 = double_pendulum_energy(s[0], s[1], s[2], s[3], G, l1, l2, mu)
    assert abs(e1 - e0) / e0 < 1e-4


def test_criterion_6_bounce_energy_ratio():
    e = 0.8
    _, events = simulate_with_events(
        SimSpec(kind=K.BOUNCING_BALL, y0=0.0, vy0=4.0, restitution=e,
                duration=2.0))
    assert len(events) >= 2
    # ratio of successive impact kinetic energies (vertical drop, vx = 0)
    v1, v2 = events[0].vy_before, events[1].vy_before
    assert abs(v2 ** 2 / v1 ** 2 - e ** 2) < 1e-6


def test_criterion_6_small_angle_period():
    length = 0.5
    traj = simulate(SimSpec(kind=K.HOLONOMIC_PENDULUM, theta0=0.1,
                            length_1=length, pivot=(0.0, 1.0),
                            damping_b_over_m=0.0, duration=4.0))
    theta = np.arctan2(traj.x, -(traj.y - 1.0))
    sign = np.sign(theta)
    ups = np.where((sign[:-1] < 0) & (sign[1:] >= 0))[0]
    cross = [traj.t[i] - theta[i] * (traj.t[i + 1] - traj.t[i])
             / (theta[i + 1] - theta[i]) for i in ups]
    measured = float(np.mean(np.diff(cross)))
    assert abs(measured - 2 * math.pi * math.sqrt(length / G)) \
        / (2 * math.pi * math.sqrt(length / G)) < 0.01


# --- criterion 7: score bounds and discard semantics -------------------------


def test_criterion_7_all_emitted_scores_in_unit_interval(reference_reports):
    for report in reference_reports.values():
        for record in report.records:
            assert 0.0 <= record.physical_invariance <= 1.0
            assert 0.0 <= record.dynamical_score <= 1.0
            for value in (record.invariance_components or {}).values():
                assert 0.0 <= value <= 1.0
        assert 0.0 <= report.mean_physical_invariance <= 1.0
        assert 0.0 <= report.mean_dynamical_score <= 1.0


def test_criterion_7_discarded_rows_contribute_exact_zero():
    items = reference_items(K.FALLING_BALL)[:3]
    frozen = corrupt(items[0].trajectory, simulate_freeze := __import__(
        "physbench.simulate", fromlist=["Freeze"]).Freeze(start_t=0.0))
    items.append(TrajectoryFile(name="frozen", trajectory=frozen, pivot=None))
    manifest = RunManifest.from_dict({
        "run_id": "c7", "experiment": "falling_ball",
        "gate": {"frame_diagonal": 3.0},
        "pinn": {"iterations": 400}})
    report = run_batch(manifest, items, workers=WORKERS)
    assert report.discard_rate == pytest.approx(0.25, abs=1e-15)
    discarded = [r for r in report.records if not r.kept]
    assert len(discarded) == 1
    assert discarded[0].physical_invariance == 0.0
    assert discarded[0].dynamical_score == 0.0
    kept_sum = sum(r.dynamical_score for r in report.records if r.kept)
    assert report.mean_dynamical_score == pytest.approx(kept_sum / 4,
                                                        abs=1e-15)


def test_criterion_7_discard_rate_formula_exact():
    verdicts = ([GateVerdict(False, GateReason.DISAPPEAR)]
                + [GateVerdict(False, GateReason.DUPLICATE)]
                + [GateVerdict(False, GateReason.STILL)]
                + [GateVerdict(True, GateReason.KEPT)] * 7)
    summary = discard_rate(verdicts)
    assert summary.rate == 0.3
    assert sum(summary.counts.values()) == 3
    assert summary.counts[GateReason.DISAPPEAR] == 1
    assert summary.counts[GateReason.DUPLICATE] == 1
    assert summary.counts[GateReason.STILL] == 1


# --- criterion 8: bit-for-bit reproducibility --------------------------------


def test_criterion_8_rerun_reproduces_outputs_bitwise():
    manifest = RunManifest.from_dict({
        "run_id": "repro", "experiment": "falling_ball",
        "source_label": "repro", "gate": {"frame_diagonal": 3.0}})
    items = reference_items(K.FALLING_BALL)[:2]
    first = run_batch(manifest, items, workers=WORKERS)
    second = run_batch(manifest, items, workers=WORKERS)
    assert json.dumps(first.to_dict(), sort_keys=True) == \
        json.dumps(second.to_dict(), sort_keys=True)
