"""Ground-truth trajectory generation by numerical integration.

Each experiment kind integrates its planar equations of motion with classical
RK4 at a fine internal step and samples the state at the requested fps.  The
bouncing ball reflects its vertical velocity at ground crossings found by
bisection, so energy accounting stays exact across impacts.

Corruptions produce controlled *unphysical* variants of a trajectory and are
used as negative controls for the scoring pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import NumericsError, ValidationError
from .types import ExperimentKind, Trajectory

STATE_NORM_LIMIT = 1e9
BOUNCE_TIME_TOL = 1e-9  # s

#: Per-kind fallbacks applied when SimSpec leaves duration/damping unset.
DEFAULT_DURATION = {
    ExperimentKind.FALLING_BALL: 0.6,
    ExperimentKind.BOUNCING_BALL: 1.5,
    ExperimentKind.PROJECTILE: 0.8,
    ExperimentKind.HOLONOMIC_PENDULUM: 4.0,
    ExperimentKind.NON_HOLONOMIC_PENDULUM: 3.0,
    ExperimentKind.DOUBLE_PENDULUM: 3.0,
}

DEFAULT_DAMPING = {
    ExperimentKind.FALLING_BALL: 0.0,
    ExperimentKind.BOUNCING_BALL: 0.0,
    ExperimentKind.PROJECTILE: 0.0,
    ExperimentKind.HOLONOMIC_PENDULUM: 0.01,
    # String suspension dissipates noticeably more than the rigid rod rig.
    ExperimentKind.NON_HOLONOMIC_PENDULUM: 0.05,
    ExperimentKind.DOUBLE_PENDULUM: 0.0,
}

#: Kinds whose trajectories carry a pivot in their sidecar metadata.
PENDULUM_SIM_KINDS = (ExperimentKind.HOLONOMIC_PENDULUM,
                      ExperimentKind.NON_HOLONOMIC_PENDULUM,
                      ExperimentKind.DOUBLE_PENDULUM)


@dataclass(frozen=True)
class SimSpec:
    """Everything needed to generate one trajectory.

    Ball kinds use ``x0/y0/vx0/vy0``; pendulum kinds use the angles (measured
    from the downward vertical), angular velocities, pivot and lengths.
    ``duration`` and ``damping_b_over_m`` default per kind when left unset.
    ``noise_sigma`` is Gaussian position noise in the *output* units (meters,
    or pixels when pixel output is requested), mimicking tracking jitter.
    """

    kind: ExperimentKind
    g: float = 9.81
    fps: float = 120.0
    duration: float | None = None
    integrator_dt: float = 1e-3
    seed: int = 0
    noise_sigma: float = 0.0
    # balls
    x0: float = 0.0
    y0: float = 1.0
    vx0: float = 0.0
    vy0: float = 0.0
    restitution: float = 0.8
    ground_y: float = 0.0
    # pendulums
    theta0: float = 0.4
    omega0: float = 0.0
    theta2_0: float = 0.6
    omega2_0: float = 0.0
    pivot: tuple[float, float] = (0.0, 1.0)
    length_1: float = 0.35
    length_2: float = 0.30
    mass_ratio: float = 1.0
    damping_b_over_m: float | None = None
    # output projection
    output_unit: str = "meters"  # "meters" | "pixels"
    pixels_per_meter: float = 400.0
    origin_px: tuple[float, float] = (100.0, 600.0)

    def resolved_duration(self) -> float:
        return self.duration if self.duration is not None else DEFAULT_DURATION[self.kind]

    def resolved_damping(self) -> float:
        if self.damping_b_over_m is not None:
            return self.damping_b_over_m
        return DEFAULT_DAMPING[self.kind]

    def validate(self) -> None:
        if self.g <= 0:
            raise ValidationError("g must be positive")
        if self.fps <= 0:
            raise ValidationError("fps must be positive")
        if self.resolved_duration() <= 0:
            raise ValidationError("duration must be positive")
        if self.integrator_dt <= 0 or self.integrator_dt > 1.0 / (4.0 * self.fps):
            raise ValidationError("integrator_dt must be positive and <= 1/(4*fps)")
        if not 0.0 < self.restitution <= 1.0:
            raise ValidationError("restitution must lie in (0, 1]")
        if self.length_1 <= 0 or self.length_2 <= 0:
            raise ValidationError("pendulum lengths must be positive")
        if self.mass_ratio <= 0:
            raise ValidationError("mass_ratio must be positive")
        if self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be nonnegative")
        if self.output_unit not in ("meters", "pixels"):
            raise ValidationError(f"unknown output_unit {self.output_unit!r}")
        if self.output_unit == "pixels" and self.pixels_per_meter <= 0:
            raise ValidationError("pixels_per_meter must be positive")
        if self.kind == ExperimentKind.BOUNCING_BALL and self.y0 < self.ground_y:
            raise ValidationError("bouncing ball must start at or above the ground")


@dataclass(frozen=True)
class BounceEvent:
    t: float
    vy_before: float
    vy_after: float


# --- corruptions -----------------------------------------------------------


@dataclass(frozen=True)
class Levitate:
    """Hold the position fixed for a while, then resume the original motion
    shifted in time (the tail picks up where it left off)."""
    start_t: float
    hold_duration: float


@dataclass(frozen=True)
class GravityScale:
    """Scale all displacements about the first sample, which scales every
    velocity and acceleration by ``factor``."""
    factor: float


@dataclass(frozen=True)
class Teleport:
    """Instantaneous position offset from ``at_t`` onward."""
    at_t: float
    offset: tuple[float, float]


@dataclass(frozen=True)
class Freeze:
    """Hold the position fixed from ``start_t`` to the end."""
    start_t: float


@dataclass(frozen=True)
class AdditiveNoise:
    """Seeded i.i.d. Gaussian position noise in native units."""
    sigma: float


Corruption = Levitate | GravityScale | Teleport | Freeze | AdditiveNoise

_CORRUPTION_TYPES = {
    "levitate": Levitate,
    "gravity_scale": GravityScale,
    "teleport": Teleport,
    "freeze": Freeze,
    "additive_noise": AdditiveNoise,
}


def corruption_from_dict(data: dict) -> Corruption:
    """Build a corruption from its JSON form, e.g.
    ``{"type": "levitate", "start_t": 0.3, "hold_duration": 1.2}``."""
    if not isinstance(data, dict) or "type" not in data:
        raise ValidationError("corruption spec must be an object with a "
                              "'type' field")
    kind = data["type"]
    if kind not in _CORRUPTION_TYPES:
        raise ValidationError(f"unknown corruption type {kind!r}, expected "
                              f"one of {sorted(_CORRUPTION_TYPES)}")
    kwargs = {k: v for k, v in data.items() if k != "type"}
    if "offset" in kwargs and isinstance(kwargs["offset"], list):
        kwargs["offset"] = tuple(kwargs["offset"])
    try:
        return _CORRUPTION_TYPES[kind](**kwargs)
    except TypeError as e:
        raise ValidationError(f"bad parameters for corruption {kind!r}: {e}") from None


# --- integration -----------------------------------------------------------


def rk4_step(state: np.ndarray, derivative_fn: Callable[[np.ndarray], np.ndarray],
             dt: float) -> np.ndarray:
    """One classical 4th-order Runge-Kutta update of an autonomous system."""
    if dt <= 0:
        raise ValidationError("dt must be positive")
    state = np.asarray(state, dtype=float)
    k1 = np.asarray(derivative_fn(state), dtype=float)
    k2 = np.asarray(derivative_fn(state + 0.5 * dt * k1), dtype=float)
    k3 = np.asarray(derivative_fn(state + 0.5 * dt * k2), dtype=float)
    k4 = np.asarray(derivative_fn(state + dt * k3), dtype=float)
    if not (np.all(np.isfinite(k1)) and np.all(np.isfinite(k2))
            and np.all(np.isfinite(k3)) and np.all(np.isfinite(k4))):
        raise NumericsError("derivative is not finite")
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _ballistic_deriv(g: float):
    def f(s):
        return np.array([s[2], s[3], 0.0, -g])
    return f


def pendulum_deriv(g: float, length: float, b_over_m: float):
    def f(s):
        theta, omega = s
        return np.array([omega, -(g / length) * math.sin(theta) - b_over_m * omega])
    return f


def double_pendulum_deriv(g: float, l1: float, l2: float, mass_ratio: float,
                          b_over_m: float = 0.0):
    """Planar two-point-mass double pendulum, equations per unit first mass."""
    mu = mass_ratio

    def f(s):
        th1, w1, th2, w2 = s
        delta = th1 - th2
        cd, sd = math.cos(delta), math.sin(delta)
        m11 = (1.0 + mu) * l1
        m12 = mu * l2 * cd
        m21 = l1 * cd
        m22 = l2
        r1 = -mu * l2 * w2 * w2 * sd - (1.0 + mu) * g * math.sin(th1)
        r2 = l1 * w1 * w1 * sd - g * math.sin(th2)
        det = m11 * m22 - m12 * m21
        a1 = (r1 * m22 - m12 * r2) / det
        a2 = (m11 * r2 - r1 * m21) / det
        return np.array([w1, a1 - b_over_m * w1, w2, a2 - b_over_m * w2])
    return f


def pendulum_energy(theta, omega, g: float, length: float) -> np.ndarray:
    """Per-unit-mass energy of a rigid pendulum, zero at rest hanging down."""
    theta = np.asarray(theta, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return 0.5 * length ** 2 * omega ** 2 + g * length * (1.0 - np.cos(theta))


def double_pendulum_energy(th1, w1, th2, w2, g: float, l1: float, l2: float,
                           mass_ratio: float) -> np.ndarray:
    """Total energy per unit first mass, zero at rest hanging down."""
    mu = mass_ratio
    th1, w1 = np.asarray(th1, float), np.asarray(w1, float)
    th2, w2 = np.asarray(th2, float), np.asarray(w2, float)
    kin = (0.5 * (1.0 + mu) * l1 ** 2 * w1 ** 2 + 0.5 * mu * l2 ** 2 * w2 ** 2
           + mu * l1 * l2 * w1 * w2 * np.cos(th1 - th2))
    pot = g * ((1.0 + mu) * l1 * (1.0 - np.cos(th1)) + mu * l2 * (1.0 - np.cos(th2)))
    return kin + pot


def _check_state(state: np.ndarray) -> None:
    if not np.all(np.isfinite(state)) or np.linalg.norm(state) > STATE_NORM_LIMIT:
        raise NumericsError(f"integration diverged: state {state}")


def _step_with_bounces(state: np.ndarray, h: float, deriv, ground_y: float,
                       restitution: float, t_base: float,
                       events: list[BounceEvent]) -> np.ndarray:
    """Advance by h, reflecting the vertical velocity at ground crossings."""
    remaining = h
    t = t_base
    for _ in range(32):
        nxt = rk4_step(state, deriv, remaining)
        if nxt[1] >= ground_y:
            return nxt
        # bisect the crossing time within this step
        lo, hi = 0.0, 1.0
        while (hi - lo) * remaining > BOUNCE_TIME_TOL:
            mid = 0.5 * (lo + hi)
            if rk4_step(state, deriv, mid * remaining)[1] < ground_y:
                hi = mid
            else:
                lo = mid
        impact = rk4_step(state, deriv, hi * remaining)
        vy = impact[3]
        impact[1] = ground_y
        impact[3] = -restitution * vy
        events.append(BounceEvent(t=t + hi * remaining, vy_before=vy,
                                  vy_after=impact[3]))
        t += hi * remaining
        remaining *= 1.0 - hi
        state = impact
        if remaining <= 0.0:
            return state
    raise NumericsError("too many ground impacts within one integrator step")


def _integrate(spec: SimSpec, events: list[BounceEvent]):
    """Return (sample_times, states) with states sampled exactly at k/fps."""
    duration = spec.resolved_duration()
    b_over_m = spec.resolved_damping()
    kind = spec.kind

    if kind in (ExperimentKind.FALLING_BALL, ExperimentKind.BOUNCING_BALL,
                ExperimentKind.PROJECTILE):
        state = np.array([spec.x0, spec.y0, spec.vx0, spec.vy0])
        deriv = _ballistic_deriv(spec.g)
    elif kind in (ExperimentKind.HOLONOMIC_PENDULUM,
                  ExperimentKind.NON_HOLONOMIC_PENDULUM):
        state = np.array([spec.theta0, spec.omega0])
        deriv = pendulum_deriv(spec.g, spec.length_1, b_over_m)
    elif kind == ExperimentKind.DOUBLE_PENDULUM:
        state = np.array([spec.theta0, spec.omega0, spec.theta2_0, spec.omega2_0])
        deriv = double_pendulum_deriv(spec.g, spec.length_1, spec.length_2,
                                      spec.mass_ratio, b_over_m)
    else:  # pragma: no cover
        raise ValidationError(f"unknown experiment kind {kind}")

    n_samples = int(math.floor(duration * spec.fps + 1e-9)) + 1
    frame_dt = 1.0 / spec.fps
    sub = int(math.ceil(frame_dt / spec.integrator_dt - 1e-12))
    h = frame_dt / sub

    bouncing = kind == ExperimentKind.BOUNCING_BALL
    states = [state]
    for k in range(n_samples - 1):
        for j in range(sub):
            if bouncing:
                state = _step_with_bounces(state, h, deriv, spec.ground_y,
                                           spec.restitution,
                                           k * frame_dt + j * h, events)
            else:
                state = rk4_step(state, deriv, h)
            _check_state(state)
        states.append(state)
    times = np.arange(n_samples) / spec.fps
    return times, np.array(states)


def states_to_positions(spec: SimSpec, states: np.ndarray):
    """Map integrator states to metric y-up positions.

    Returns (primary, secondary) where secondary is None except for the
    double pendulum (elbow bob is primary, end bob secondary).
    """
    kind = spec.kind
    if kind in (ExperimentKind.FALLING_BALL, ExperimentKind.BOUNCING_BALL,
                ExperimentKind.PROJECTILE):
        return states[:, :2].copy(), None
    px, py = spec.pivot
    if kind in (ExperimentKind.HOLONOMIC_PENDULUM,
                ExperimentKind.NON_HOLONOMIC_PENDULUM):
        theta = states[:, 0]
        bob = np.column_stack([px + spec.length_1 * np.sin(theta),
                               py - spec.length_1 * np.cos(theta)])
        return bob, None
    th1, th2 = states[:, 0], states[:, 2]
    bob1 = np.column_stack([px + spec.length_1 * np.sin(th1),
                            py - spec.length_1 * np.cos(th1)])
    bob2 = bob1 + np.column_stack([spec.length_2 * np.sin(th2),
                                   -spec.length_2 * np.cos(th2)])
    return bob1, bob2


def project_to_pixels(points: np.ndarray, pixels_per_meter: float,
                      origin_px: Sequence[float]) -> np.ndarray:
    """Metric y-up points -> pixel y-down points."""
    out = np.empty_like(points)
    out[:, 0] = origin_px[0] + pixels_per_meter * points[:, 0]
    out[:, 1] = origin_px[1] - pixels_per_meter * points[:, 1]
    return out


def simulate(spec: SimSpec) -> Trajectory:
    """Generate one trajectory; deterministic given the spec (incl. seed)."""
    traj, _ = simulate_with_events(spec)
    return traj


def simulate_with_events(spec: SimSpec) -> tuple[Trajectory, list[BounceEvent]]:
    """Like :func:`simulate` but also returns the ground-impact log."""
    spec.validate()
    events: list[BounceEvent] = []
    times, states = _integrate(spec, events)
    primary, secondary = states_to_positions(spec, states)

    if spec.output_unit == "pixels":
        primary = project_to_pixels(primary, spec.pixels_per_meter, spec.origin_px)
        if secondary is not None:
            secondary = project_to_pixels(secondary, spec.pixels_per_meter,
                                          spec.origin_px)
        unit, y_axis, ppm = "pixels", "down", spec.pixels_per_meter
    else:
        unit, y_axis, ppm = "meters", "up", None

    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        primary = primary + rng.normal(0.0, spec.noise_sigma, primary.shape)
        if secondary is not None:
            secondary = secondary + rng.normal(0.0, spec.noise_sigma,
                                               secondary.shape)

    n = len(times)
    traj = Trajectory(
        t=times, x=primary[:, 0], y=primary[:, 1],
        visible=np.ones(n, dtype=bool), object_count=np.ones(n, dtype=int),
        fps=spec.fps, experiment=spec.kind, unit=unit, y_axis=y_axis,
        pixels_per_meter=ppm,
        x2=None if secondary is None else secondary[:, 0],
        y2=None if secondary is None else secondary[:, 1],
    )
    return traj, events


def native_pivot(spec: SimSpec) -> tuple[float, float]:
    """The pivot in the coordinates of the trajectory simulate() writes."""
    if spec.output_unit == "pixels":
        p = project_to_pixels(np.array([spec.pivot]), spec.pixels_per_meter,
                              spec.origin_px)[0]
        return float(p[0]), float(p[1])
    return spec.pivot


# --- trajectory corruption -------------------------------------------------


def _interp_positions(traj: Trajectory, at: np.ndarray) -> list[np.ndarray]:
    cols = [traj.x, traj.y] + ([traj.x2, traj.y2] if traj.x2 is not None else [])
    return [np.interp(at, traj.t, c) for c in cols]


def _apply_cols(traj: Trajectory, cols: list[np.ndarray]) -> Trajectory:
    if traj.x2 is not None:
        return traj.replace_positions(cols[0], cols[1], cols[2], cols[3])
    return traj.replace_positions(cols[0], cols[1])


def corrupt(traj: Trajectory, corruption: Corruption, seed: int = 0) -> Trajectory:
    """Apply one deterministic unphysical edit to a trajectory."""
    t = traj.t
    t0, t1 = t[0], t[-1]

    def check_in_range(value: float, name: str) -> None:
        if not t0 <= value <= t1:
            raise ValidationError(f"{name}={value} outside time range [{t0}, {t1}]")

    if isinstance(corruption, AdditiveNoise):
        if corruption.sigma < 0:
            raise ValidationError("sigma must be nonnegative")
        if corruption.sigma == 0:
            return _apply_cols(traj, _interp_positions(traj, t))
        rng = np.random.default_rng(seed)
        cols = [traj.x, traj.y] + ([traj.x2, traj.y2] if traj.x2 is not None else [])
        return _apply_cols(traj, [c + rng.normal(0.0, corruption.sigma, len(c))
                                  for c in cols])

    if isinstance(corruption, GravityScale):
        if corruption.factor <= 0:
            raise ValidationError("factor must be positive")
        cols = [traj.x, traj.y] + ([traj.x2, traj.y2] if traj.x2 is not None else [])
        return _apply_cols(traj, [c[0] + corruption.factor * (c - c[0])
                                  for c in cols])

    if isinstance(corruption, Teleport):
        check_in_range(corruption.at_t, "at_t")
        dx, dy = corruption.offset
        mask = t >= corruption.at_t
        cols = [traj.x.copy(), traj.y.copy()]
        cols[0][mask] += dx
        cols[1][mask] += dy
        if traj.x2 is not None:
            extra = [traj.x2.copy(), traj.y2.copy()]
            extra[0][mask] += dx
            extra[1][mask] += dy
            cols += extra
        return _apply_cols(traj, cols)

    if isinstance(corruption, Freeze):
        check_in_range(corruption.start_t, "start_t")
        held = _interp_positions(traj, np.array([corruption.start_t]))
        mask = t >= corruption.start_t
        cols = _interp_positions(traj, t)
        for c, h in zip(cols, held):
            c[mask] = h[0]
        return _apply_cols(traj, cols)

    if isinstance(corruption, Levitate):
        check_in_range(corruption.start_t, "start_t")
        if corruption.hold_duration < 0:
            raise ValidationError("hold_duration must be nonnegative")
        check_in_range(corruption.start_t + corruption.hold_duration,
                       "start_t + hold_duration")
        start, hold = corruption.start_t, corruption.hold_duration
        # before: unchanged; during: held; after: original shifted by `hold`
        src = np.where(t < start, t, np.where(t < start + hold, start, t - hold))
        return _apply_cols(traj, _interp_positions(traj, src))

    raise ValidationError(f"unknown corruption {corruption!r}")
