"""Velocity and acceleration estimation from tracked positions.

The estimation pipeline is, per coordinate:

1. central differences (one-sided at the endpoints),
2. sliding-window linear-regression slopes,
3. a weighted blend of the two (weight ``blend_alpha`` on the regression),
4. Savitzky-Golay smoothing of the blended velocity,
5. acceleration as the central difference of the smoothed velocity.

Windows are truncated at the series edges; nothing is ever padded or
extrapolated, so output series always have the input length.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, ValidationError
from .types import KinematicsConfig, KinematicSeries, Trajectory

#: Relative timestamp jitter tolerated by the smoothing stage, which assumes
#: fixed-fps sampling.
MAX_DT_JITTER = 0.01


def _check_series(values: np.ndarray, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values, dtype=float)
    times = np.asarray(times, dtype=float)
    if values.shape != times.shape or values.ndim != 1:
        raise ValidationError("values and times must be 1-D arrays of equal length")
    if len(values) < 3:
        raise ValidationError(f"need at least 3 samples, got {len(values)}")
    if np.any(np.diff(times) <= 0):
        raise ValidationError("times must be strictly increasing")
    return values, times


def central_difference(values, times) -> np.ndarray:
    """Symmetric difference quotient; forward/backward at the endpoints.

    Exact for quadratics at interior points when sampling is uniform.
    """
    x, t = _check_series(values, times)
    d = np.empty_like(x)
    d[1:-1] = (x[2:] - x[:-2]) / (t[2:] - t[:-2])
    d[0] = (x[1] - x[0]) / (t[1] - t[0])
    d[-1] = (x[-1] - x[-2]) / (t[-1] - t[-2])
    return d


def regression_window_bounds(i: int, n: int, window: int) -> tuple[int, int]:
    """[lo, hi) sample range of the regression window centered at ``i``.

    Near the edges the window shrinks symmetrically (a shrunk centered window
    keeps the slope unbiased for curved series); the two endpoint samples,
    where no centered window exists, fall back to their one-sided pair.
    """
    half = window // 2
    reach = min(i, n - 1 - i, half)
    if reach == 0:
        return (0, 2) if i == 0 else (n - 2, n)
    return i - reach, i + reach + 1


def window_regression_slope(values, times, window: int) -> np.ndarray:
    """Per-sample slope of the least-squares line over a centered window.

    Windows shrink at the series edges rather than padding; every slope is
    the exact normal-equation solution for its own, possibly shorter, window.
    """
    x, t = _check_series(values, times)
    if window % 2 == 0 or window < 3:
        raise ConfigError("window must be an odd integer >= 3")
    n = len(x)
    if window > n:
        raise ConfigError(f"window {window} exceeds series length {n}")
    slopes = np.empty_like(x)
    for i in range(n):
        lo, hi = regression_window_bounds(i, n, window)
        tw = t[lo:hi] - t[lo:hi].mean()
        xw = x[lo:hi]
        slopes[i] = tw @ (xw - xw.mean()) / (tw @ tw)
    return slopes


def blend_velocity(v_regression, v_central, alpha: float) -> np.ndarray:
    """alpha * v_regression + (1 - alpha) * v_central, elementwise."""
    v_reg = np.asarray(v_regression, dtype=float)
    v_cd = np.asarray(v_central, dtype=float)
    if v_reg.shape != v_cd.shape:
        raise ValidationError(f"length mismatch: {v_reg.shape} vs {v_cd.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError("alpha must lie in [0, 1]")
    return alpha * v_reg + (1.0 - alpha) * v_cd


def _sg_point_weights(offsets: np.ndarray, order: int) -> np.ndarray:
    # Least-squares polynomial fit over the window, evaluated at offset 0.
    # pinv keeps underdetermined edge windows well-defined (they interpolate).
    V = np.vander(offsets.astype(float), N=order + 1, increasing=True)
    return np.linalg.pinv(V)[0]


def savitzky_golay(values, window: int, order: int) -> np.ndarray:
    """Smooth by local polynomial least squares on a uniform grid.

    Each sample is replaced by the value at its own position of the
    degree-``order`` fit over the surrounding ``window`` samples.  Edge
    samples are fitted on asymmetric, truncated windows.  Any polynomial of
    degree <= ``order`` passes through unchanged.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise ValidationError("values must be a 1-D array")
    if window % 2 == 0 or window < 3:
        raise ConfigError("window must be an odd integer >= 3")
    if window <= order:
        raise ConfigError("window must exceed the polynomial order")
    n = len(x)
    if n < window:
        raise ValidationError(f"need at least {window} samples, got {n}")
    half = window // 2

    out = np.empty_like(x)
    interior = _sg_point_weights(np.arange(-half, half + 1), order)
    out[half:n - half] = np.convolve(x, interior[::-1], mode="valid")
    for i in range(half):
        w = _sg_point_weights(np.arange(-i, half + 1), order)
        out[i] = w @ x[: i + half + 1]
        w = _sg_point_weights(np.arange(-half, i + 1), order)
        out[n - 1 - i] = w @ x[n - 1 - i - half:]
    return out


def velocity_pipeline(values, times, cfg: KinematicsConfig) -> np.ndarray:
    """Smoothed first derivative of one coordinate series."""
    cfg.validate()
    v_cd = central_difference(values, times)
    v_reg = window_regression_slope(values, times, cfg.regression_window)
    blended = blend_velocity(v_reg, v_cd, cfg.blend_alpha)
    return savitzky_golay(blended, cfg.sg_window, cfg.sg_order)


def check_uniform_sampling(times: np.ndarray) -> None:
    dt = np.diff(times)
    ref = np.median(dt)
    if ref <= 0 or np.max(np.abs(dt - ref)) > MAX_DT_JITTER * ref:
        raise ValidationError(
            "smoothing assumes fixed-fps sampling; timestamp jitter exceeds "
            f"{MAX_DT_JITTER:.0%} of the median frame interval")


def estimate_kinematics(traj: Trajectory, cfg: KinematicsConfig | None = None) -> KinematicSeries:
    """Full position -> velocity -> acceleration estimate for a trajectory.

    Positions are converted to meters, y up, before differentiation, so the
    returned series is unit-normalized regardless of the input convention.
    All samples must be visible; gate and interpolate upstream.
    """
    cfg = cfg or KinematicsConfig()
    cfg.validate()
    if not np.all(traj.visible):
        raise ValidationError("trajectory contains invisible samples; gate first")
    n = len(traj)
    need = max(cfg.sg_window, cfg.regression_window, 3)
    if n < need:
        raise ValidationError(f"need at least {need} samples, got {n}")
    check_uniform_sampling(traj.t)

    pos = traj.metric_positions()
    t = traj.t
    vel = np.column_stack([velocity_pipeline(pos[:, k], t, cfg) for k in range(2)])
    acc = np.column_stack([central_difference(vel[:, k], t) for k in range(2)])
    return KinematicSeries(t=t.copy(), pos=pos, vel=vel, acc=acc)
