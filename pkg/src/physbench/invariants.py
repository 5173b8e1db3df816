"""Conserved-quantity series and their conversion to invariance scores.

Every experiment kind maps to a small set of quantities that ideal dynamics
keep constant (energy per unit mass, vertical acceleration, horizontal
velocity, pendulum energy/period/length).  Each series is scored by sliding a
window over it, computing the windowed deviation (relative when the window
mean dominates its standard deviation, absolute otherwise), mapping it
through 1 / (1 + alpha * deviation), and keeping the best window.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    FitError,
    InsufficientOscillationError,
    ValidationError,
)
from .kinematics import estimate_kinematics, velocity_pipeline
from .types import (
    BALL_KINDS,
    ExperimentKind,
    ExperimentSpec,
    KinematicSeries,
    KinematicsConfig,
    Trajectory,
)


class InvariantKind(str, enum.Enum):
    ENERGY_PER_MASS = "energy_per_mass"
    VERTICAL_ACCELERATION = "vertical_acceleration"
    HORIZONTAL_VELOCITY = "horizontal_velocity"
    PENDULUM_ENERGY = "pendulum_energy"
    PENDULUM_PERIOD = "pendulum_period"
    PENDULUM_LENGTH = "pendulum_length"
    DOUBLE_PENDULUM_ENERGY = "double_pendulum_energy"
    LENGTH_1 = "length_1"
    LENGTH_2 = "length_2"


#: Human-readable table labels for per-invariant report columns.
INVARIANT_LABELS = {
    InvariantKind.ENERGY_PER_MASS: "Energy Conservation",
    InvariantKind.VERTICAL_ACCELERATION: "Acceleration Conservation",
    InvariantKind.HORIZONTAL_VELOCITY: "Horizontal Momentum Conservation",
    InvariantKind.PENDULUM_ENERGY: "Energy Conservation",
    InvariantKind.PENDULUM_PERIOD: "Period Conservation",
    InvariantKind.PENDULUM_LENGTH: "Distance Conservation",
}


@dataclass(frozen=True)
class InvariantSeries:
    kind: InvariantKind
    values: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))
        if self.values.shape != self.t.shape:
            raise ValidationError("values and t must have equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError(f"{self.kind.value} series contains "
                                  "non-finite values")


@dataclass(frozen=True)
class ScoreConfig:
    """Windowed-deviation score settings.

    Generated clips are short, so they use the wider window fraction; the
    ``reference`` flag of :func:`invariance_score` switches to the narrow one.
    """

    alpha: float = 1.0
    window_fraction_generated: float = 0.25
    window_fraction_reference: float = 0.10
    zero_mean_sigma_multiplier: float = 10.0

    def validate(self) -> None:
        if self.alpha <= 0:
            raise ValidationError("alpha must be positive")
        for name in ("window_fraction_generated", "window_fraction_reference"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValidationError(f"{name} must lie in (0, 1]")
        if self.zero_mean_sigma_multiplier <= 0:
            raise ValidationError("zero_mean_sigma_multiplier must be positive")


@dataclass(frozen=True)
class PivotEstimate:
    center: tuple[float, float]
    radius: float
    rms_residual: float


@dataclass(frozen=True)
class PendulumSeries:
    theta: np.ndarray  # unwrapped, from the downward vertical
    theta_dot: np.ndarray
    energy: InvariantSeries
    length: InvariantSeries


@dataclass(frozen=True)
class InvarianceResult:
    components: dict[InvariantKind, float]
    aggregate: float


# --- per-sample invariant series -------------------------------------------


def energy_per_mass(kin: KinematicSeries, g: float) -> InvariantSeries:
    """E/m = v^2/2 + g*y, in J/kg (series must be metric, y up)."""
    values = 0.5 * (kin.vel[:, 0] ** 2 + kin.vel[:, 1] ** 2) + g * kin.pos[:, 1]
    return InvariantSeries(InvariantKind.ENERGY_PER_MASS, values, kin.t)


def vertical_acceleration(kin: KinematicSeries) -> InvariantSeries:
    return InvariantSeries(InvariantKind.VERTICAL_ACCELERATION,
                           kin.acc[:, 1].copy(), kin.t)


def horizontal_velocity(kin: KinematicSeries) -> InvariantSeries:
    return InvariantSeries(InvariantKind.HORIZONTAL_VELOCITY,
                           kin.vel[:, 0].copy(), kin.t)


# --- pendulum geometry ------------------------------------------------------

MIN_PIVOT_SAMPLES = 10
MIN_ARC_SPAN = 0.2  # rad


def estimate_pivot(traj: Trajectory) -> PivotEstimate:
    """Algebraic least-squares circle fit of the bob path.

    Minimizes sum(((x-a)^2 + (y-b)^2 - r^2)^2) via its linear form.  Works in
    metric y-up coordinates.
    """
    pos = traj.metric_positions()
    n = len(pos)
    if n < MIN_PIVOT_SAMPLES:
        raise ValidationError(f"pivot fit needs >= {MIN_PIVOT_SAMPLES} samples, "
                              f"got {n}")
    x, y = pos[:, 0], pos[:, 1]
    A = np.column_stack([2 * x, 2 * y, np.ones(n)])
    rhs = x ** 2 + y ** 2
    sol, _, rank, sv = np.linalg.lstsq(A, rhs, rcond=None)
    if rank < 3 or sv[-1] < 1e-12 * sv[0]:
        raise FitError("degenerate circle fit (collinear or repeated points)")
    a, b, k = sol
    r_sq = k + a ** 2 + b ** 2
    if r_sq <= 0:
        raise FitError("circle fit produced a non-positive radius")
    radius = float(np.sqrt(r_sq))
    angles = np.unwrap(np.arctan2(y - b, x - a))
    if angles.max() - angles.min() < MIN_ARC_SPAN:
        raise FitError(f"bob path spans {angles.max() - angles.min():.3f} rad "
                       f"of arc, need >= {MIN_ARC_SPAN}")
    dist = np.hypot(x - a, y - b)
    rms = float(np.sqrt(np.mean((dist - radius) ** 2)))
    return PivotEstimate(center=(float(a), float(b)), radius=radius,
                         rms_residual=rms)


def pendulum_series(traj: Trajectory, pivot: tuple[float, float], g: float,
                    length: float | None = None,
                    kin_cfg: KinematicsConfig | None = None) -> PendulumSeries:
    """Angle, angular velocity, energy and length series of a pendulum bob.

    The angle is measured from the downward vertical and unwrapped; its
    derivative goes through the same velocity pipeline as positions.  The
    per-unit-mass energy is l^2 * w^2 / 2 + g*l*(1 - cos(theta)) with a
    constant rod length ``length`` (median bob-pivot distance when not given).
    """
    pos = traj.metric_positions()
    dx = pos[:, 0] - pivot[0]
    dy = pos[:, 1] - pivot[1]
    dist = np.hypot(dx, dy)
    if np.any(dist < 1e-9):
        raise ValidationError("bob coincides with the pivot")
    theta = np.unwrap(np.arctan2(dx, -dy))
    theta_dot = velocity_pipeline(theta, traj.t, kin_cfg or KinematicsConfig())
    l = float(np.median(dist)) if length is None else float(length)
    energy = 0.5 * l ** 2 * theta_dot ** 2 + g * l * (1.0 - np.cos(theta))
    return PendulumSeries(
        theta=theta, theta_dot=theta_dot,
        energy=InvariantSeries(InvariantKind.PENDULUM_ENERGY, energy, traj.t),
        length=InvariantSeries(InvariantKind.PENDULUM_LENGTH, dist, traj.t),
    )


def estimate_period(theta, t) -> InvariantSeries:
    """Successive oscillation periods from mean crossings of the angle.

    Crossing times of (theta - mean) are interpolated linearly between
    samples; each period estimate is the gap between consecutive crossings in
    the same direction, timestamped at the midpoint of the pair.
    """
    theta = np.asarray(theta, dtype=float)
    t = np.asarray(t, dtype=float)
    if theta.shape != t.shape or theta.ndim != 1:
        raise ValidationError("theta and t must be 1-D arrays of equal length")
    c = theta - theta.mean()
    idx = np.where(c[:-1] * c[1:] < 0)[0]
    crossings = t[idx] + (t[idx + 1] - t[idx]) * (-c[idx]) / (c[idx + 1] - c[idx])
    upward = c[idx + 1] > c[idx]
    periods, stamps = [], []
    for direction in (True, False):
        times = crossings[upward == direction]
        periods.extend(np.diff(times))
        stamps.extend(0.5 * (times[1:] + times[:-1]))
    if not periods:
        raise InsufficientOscillationError(
            f"found {len(crossings)} mean crossings, need two in the same "
            "direction to estimate a period")
    order = np.argsort(stamps)
    return InvariantSeries(InvariantKind.PENDULUM_PERIOD,
                           np.asarray(periods)[order],
                           np.asarray(stamps)[order])


def double_pendulum_angles(traj: Trajectory, pivot: tuple[float, float]):
    """Unwrapped (theta1, theta2) plus per-frame segment lengths."""
    if traj.x2 is None:
        raise ValidationError("double pendulum requires the second bob "
                              "(x2/y2 columns)")
    bob1 = traj.metric_positions()
    bob2 = traj.metric_positions_secondary()
    d1 = bob1 - np.asarray(pivot)
    d2 = bob2 - bob1
    len1 = np.hypot(d1[:, 0], d1[:, 1])
    len2 = np.hypot(d2[:, 0], d2[:, 1])
    if np.any(len1 < 1e-9) or np.any(len2 < 1e-9):
        raise ValidationError("bob coincides with its suspension point")
    th1 = np.unwrap(np.arctan2(d1[:, 0], -d1[:, 1]))
    th2 = np.unwrap(np.arctan2(d2[:, 0], -d2[:, 1]))
    return th1, th2, len1, len2


# --- scoring ----------------------------------------------------------------


def invariance_score(series: InvariantSeries, cfg: ScoreConfig | None = None,
                     reference: bool = False) -> float:
    """Best windowed score of a conserved-quantity series, in [0, 1].

    Windows of round(fraction * n) samples slide with stride 1.  A window
    whose mean magnitude is at least ``zero_mean_sigma_multiplier`` times its
    standard deviation is scored on relative deviation; near-zero-mean
    windows fall back to the absolute deviation.
    """
    cfg = cfg or ScoreConfig()
    cfg.validate()
    values = series.values
    n = len(values)
    if n < 4:
        raise ValidationError(f"need at least 4 samples to score, got {n}")
    frac = cfg.window_fraction_reference if reference else cfg.window_fraction_generated
    w = int(round(frac * n))
    w = max(2, min(n, w))
    best = 0.0
    for i in range(n - w + 1):
        seg = values[i:i + w]
        if seg.max() == seg.min():  # exactly conserved window
            return 1.0
        mean = seg.mean()
        std = seg.std()
        if std == 0.0:
            return 1.0
        if abs(mean) >= cfg.zero_mean_sigma_multiplier * std:
            dev = std / abs(mean)
        else:
            dev = std
        best = max(best, 1.0 / (1.0 + cfg.alpha * dev))
    return best


def aggregate_invariance(component_scores) -> float:
    """Overall Physical Invariance score: arithmetic mean of the components."""
    scores = np.asarray(list(component_scores), dtype=float)
    if scores.size == 0:
        raise ValidationError("no component scores to aggregate")
    return float(scores.mean())


def _resolve_pivot(traj: Trajectory, spec: ExperimentSpec):
    """(pivot_center, fitted_radius_or_None) in meters, y up."""
    if spec.pivot is not None:
        return tuple(spec.pivot), None
    est = estimate_pivot(traj)
    return est.center, est.radius


def invariant_series_for(traj: Trajectory, spec: ExperimentSpec,
                         kin_cfg: KinematicsConfig | None = None
                         ) -> list[InvariantSeries]:
    """The experiment's conserved-quantity series, in report order."""
    spec.validate()
    kin_cfg = kin_cfg or KinematicsConfig()
    kind = spec.kind

    if kind in BALL_KINDS:
        kin = estimate_kinematics(traj, kin_cfg)
        return [energy_per_mass(kin, spec.g),
                vertical_acceleration(kin),
                horizontal_velocity(kin)]

    if kind in (ExperimentKind.HOLONOMIC_PENDULUM,
                ExperimentKind.NON_HOLONOMIC_PENDULUM):
        pivot, fitted_radius = _resolve_pivot(traj, spec)
        length = spec.length if spec.length is not None else fitted_radius
        pend = pendulum_series(traj, pivot, spec.g, length=length,
                               kin_cfg=kin_cfg)
        if kind == ExperimentKind.NON_HOLONOMIC_PENDULUM:
            return [pend.energy]
        period = estimate_period(pend.theta, traj.t)
        return [pend.energy, period, pend.length]

    if kind == ExperimentKind.DOUBLE_PENDULUM:
        pivot, _ = _resolve_pivot(traj, spec)
        th1, th2, len1, len2 = double_pendulum_angles(traj, pivot)
        l1 = spec.length_1 if spec.length_1 is not None else float(np.median(len1))
        l2 = spec.length_2 if spec.length_2 is not None else float(np.median(len2))
        w1 = velocity_pipeline(th1, traj.t, kin_cfg)
        w2 = velocity_pipeline(th2, traj.t, kin_cfg)
        mu = spec.mass_ratio
        kin_e = (0.5 * (1.0 + mu) * l1 ** 2 * w1 ** 2
                 + 0.5 * mu * l2 ** 2 * w2 ** 2
                 + mu * l1 * l2 * w1 * w2 * np.cos(th1 - th2))
        pot_e = spec.g * ((1.0 + mu) * l1 * (1.0 - np.cos(th1))
                          + mu * l2 * (1.0 - np.cos(th2)))
        return [InvariantSeries(InvariantKind.DOUBLE_PENDULUM_ENERGY,
                                kin_e + pot_e, traj.t),
                InvariantSeries(InvariantKind.LENGTH_1, len1, traj.t),
                InvariantSeries(InvariantKind.LENGTH_2, len2, traj.t)]

    raise ValidationError(f"unknown experiment kind {kind}")  # pragma: no cover


def physical_invariance(traj: Trajectory, spec: ExperimentSpec,
                        cfg: ScoreConfig | None = None,
                        kin_cfg: KinematicsConfig | None = None,
                        reference: bool = False) -> InvarianceResult:
    """Score every invariant of the experiment and aggregate.

    Raises if a sub-operation cannot produce a series (e.g. too few
    oscillations for the period); the caller decides how to record that.
    """
    cfg = cfg or ScoreConfig()
    series = invariant_series_for(traj, spec, kin_cfg)
    components = {s.kind: invariance_score(s, cfg, reference=reference)
                  for s in series}
    return InvarianceResult(components=components,
                            aggregate=aggregate_invariance(components.values()))
