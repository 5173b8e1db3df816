"""Core trajectory containers shared by every stage of the pipeline.

All physics downstream of :class:`Trajectory` is computed in meters with the
y axis pointing up.  Trajectories themselves may be stored in pixel, y-down
(image) coordinates; the conversion happens once, in
:meth:`Trajectory.metric_positions`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


class ExperimentKind(str, enum.Enum):
    FALLING_BALL = "falling_ball"
    BOUNCING_BALL = "bouncing_ball"
    PROJECTILE = "projectile"
    HOLONOMIC_PENDULUM = "holonomic_pendulum"
    NON_HOLONOMIC_PENDULUM = "non_holonomic_pendulum"
    DOUBLE_PENDULUM = "double_pendulum"


BALL_KINDS = (
    ExperimentKind.FALLING_BALL,
    ExperimentKind.BOUNCING_BALL,
    ExperimentKind.PROJECTILE,
)

PENDULUM_KINDS = (
    ExperimentKind.HOLONOMIC_PENDULUM,
    ExperimentKind.NON_HOLONOMIC_PENDULUM,
)


def _as_float_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Trajectory:
    """Timestamped 2D samples of one tracked object.

    ``x2``/``y2`` optionally carry a second tracked point and are only used
    for the double pendulum (elbow bob in ``x``/``y``, end bob in ``x2``/``y2``).
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    visible: np.ndarray
    object_count: np.ndarray
    fps: float
    experiment: ExperimentKind
    unit: str = "meters"  # "meters" | "pixels"
    y_axis: str = "up"  # "up" (physics) | "down" (image)
    pixels_per_meter: float | None = None
    x2: np.ndarray | None = None
    y2: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "t", _as_float_array(self.t, "t"))
        object.__setattr__(self, "x", _as_float_array(self.x, "x"))
        object.__setattr__(self, "y", _as_float_array(self.y, "y"))
        object.__setattr__(self, "visible", np.asarray(self.visible, dtype=bool))
        object.__setattr__(self, "object_count", np.asarray(self.object_count, dtype=int))
        if self.x2 is not None:
            object.__setattr__(self, "x2", _as_float_array(self.x2, "x2"))
            object.__setattr__(self, "y2", _as_float_array(self.y2, "y2"))

        n = len(self.t)
        for name in ("x", "y", "visible", "object_count"):
            if len(getattr(self, name)) != n:
                raise ValidationError(f"column {name!r} has length "
                                      f"{len(getattr(self, name))}, expected {n}")
        if (self.x2 is None) != (self.y2 is None):
            raise ValidationError("x2 and y2 must be given together")
        if self.x2 is not None and (len(self.x2) != n or len(self.y2) != n):
            raise ValidationError("secondary point columns must match sample count")
        if n == 0:
            raise ValidationError("trajectory has no samples")
        if np.any(np.diff(self.t) <= 0):
            bad = int(np.argmax(np.diff(self.t) <= 0)) + 1
            raise ValidationError(f"timestamps must be strictly increasing "
                                  f"(violated at sample {bad})")
        if self.unit not in ("meters", "pixels"):
            raise ValidationError(f"unknown unit {self.unit!r}")
        if self.y_axis not in ("up", "down"):
            raise ValidationError(f"unknown y_axis {self.y_axis!r}")
        if self.unit == "pixels":
            if self.pixels_per_meter is None or self.pixels_per_meter <= 0:
                raise ValidationError("pixels_per_meter must be positive for "
                                      "pixel-unit trajectories")
        if self.fps <= 0:
            raise ValidationError("fps must be positive")
        if np.any(self.object_count[self.visible] < 1):
            raise ValidationError("visible samples must have object_count >= 1")

    def __len__(self) -> int:
        return len(self.t)

    def _to_metric(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.unit == "pixels":
            x = x / self.pixels_per_meter
            y = y / self.pixels_per_meter
        if self.y_axis == "down":
            y = -y
        return np.column_stack([x, y])

    def metric_positions(self) -> np.ndarray:
        """Positions as an (n, 2) array in meters, y up."""
        return self._to_metric(self.x, self.y)

    def metric_positions_secondary(self) -> np.ndarray | None:
        if self.x2 is None:
            return None
        return self._to_metric(self.x2, self.y2)

    def metric_point(self, px: float, py: float) -> np.ndarray:
        """Convert one point (e.g. a pivot) given in this trajectory's native
        coordinates to meters, y up."""
        return self._to_metric(np.array([px]), np.array([py]))[0]

    def path_length(self) -> float:
        """Total polyline length in native units (stillness gating)."""
        return float(np.hypot(np.diff(self.x), np.diff(self.y)).sum())

    def replace_positions(self, x: np.ndarray, y: np.ndarray,
                          x2: np.ndarray | None = None,
                          y2: np.ndarray | None = None) -> "Trajectory":
        return Trajectory(
            t=self.t.copy(), x=x, y=y,
            visible=self.visible.copy(), object_count=self.object_count.copy(),
            fps=self.fps, experiment=self.experiment, unit=self.unit,
            y_axis=self.y_axis, pixels_per_meter=self.pixels_per_meter,
            x2=self.x2.copy() if x2 is None and self.x2 is not None else x2,
            y2=self.y2.copy() if y2 is None and self.y2 is not None else y2,
        )


@dataclass(frozen=True)
class KinematicSeries:
    """Aligned position/velocity/acceleration series in meters, y up."""

    t: np.ndarray
    pos: np.ndarray  # (n, 2)
    vel: np.ndarray  # (n, 2)
    acc: np.ndarray  # (n, 2)

    def __post_init__(self):
        n = len(self.t)
        for name in ("pos", "vel", "acc"):
            arr = getattr(self, name)
            if arr.shape != (n, 2):
                raise ValidationError(f"{name} must have shape ({n}, 2), "
                                      f"got {arr.shape}")


@dataclass(frozen=True)
class KinematicsConfig:
    """Velocity/acceleration estimation settings.

    ``blend_alpha`` weights the sliding-window regression slope against the
    central difference; the smoothing filter order is fixed by convention at 3
    but kept configurable.
    """

    regression_window: int = 7
    blend_alpha: float = 0.7
    sg_window: int = 7
    sg_order: int = 3

    def validate(self) -> None:
        from .errors import ConfigError

        if self.regression_window < 3 or self.regression_window % 2 == 0:
            raise ConfigError("regression_window must be an odd integer >= 3")
        if self.sg_window < 3 or self.sg_window % 2 == 0:
            raise ConfigError("sg_window must be an odd integer >= 3")
        if self.sg_order < 1:
            raise ConfigError("sg_order must be positive")
        if self.sg_window <= self.sg_order:
            raise ConfigError("sg_window must exceed sg_order")
        if not 0.0 <= self.blend_alpha <= 1.0:
            raise ConfigError("blend_alpha must lie in [0, 1]")


@dataclass(frozen=True)
class ExperimentSpec:
    """Physical constants an experiment needs for scoring.

    ``pivot`` is given in meters, y up.  ``length`` is the single-pendulum rod
    length; ``length_1``/``length_2`` belong to the double pendulum.  Any of
    them may be left unset, in which case they are estimated from the
    trajectory (circle fit for the pivot, median bob distance for lengths).
    """

    kind: ExperimentKind
    g: float = 9.81
    pivot: tuple[float, float] | None = None
    length: float | None = None
    length_1: float | None = None
    length_2: float | None = None
    mass_ratio: float = 1.0  # m2 / m1, double pendulum
    damping_b_over_m: float = 0.0

    def validate(self) -> None:
        if self.g <= 0:
            raise ValidationError("g must be positive")
        for name in ("length", "length_1", "length_2"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.mass_ratio <= 0:
            raise ValidationError("mass_ratio must be positive")
