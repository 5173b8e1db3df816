"""Dynamical score: per-trajectory physics-informed network fit.

A small tanh network maps time to the trajectory coordinates (vertical
position for falls, x/y for projectiles, angles for pendulums).  Its first
and second time derivatives are propagated *exactly* through the network with
second-order Taylor (hyper-dual) arithmetic, so the ODE residual at the
collocation points is evaluated without finite-difference error.  Training
minimizes  L_total = L_data + lambda * L_physics  with Adam, and the final
score is clamp(1 - NMSE, 0, 1) against the observations.

Everything is plain numpy and deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import (
    DegenerateTrajectoryError,
    TrainingError,
    ValidationError,
)
from .kinematics import central_difference
from .types import ExperimentKind, ExperimentSpec, Trajectory


@numba.njit(cache=True)
def _tanh_taylor(z0, z1, z2, u, s, u1, u2):
    """Pointwise tanh with first/second input derivatives (fused loops)."""
    m, k = z0.shape
    for i in range(m):
        for j in range(k):
            ui = math.tanh(z0[i, j])
            si = 1.0 - ui * ui
            u[i, j] = ui
            s[i, j] = si
            u1[i, j] = si * z1[i, j]
            u2[i, j] = si * (z2[i, j] - 2.0 * ui * z1[i, j] * z1[i, j])


@numba.njit(cache=True)
def _tanh_taylor_adjoint(g0, g1, g2, z1, z2, u, s, dz0, dz1, dz2):
    """Adjoints of :func:`_tanh_taylor` w.r.t. its pre-activations."""
    m, k = g0.shape
    for i in range(m):
        for j in range(k):
            ui = u[i, j]
            si = s[i, j]
            z1i = z1[i, j]
            dz0[i, j] = si * (g0[i, j] - 2.0 * (
                g1[i, j] * ui * z1i
                + g2[i, j] * (ui * z2[i, j] + (si - 2.0 * ui * ui) * z1i * z1i)))
            dz1[i, j] = si * (g1[i, j] - 4.0 * g2[i, j] * ui * z1i)
            dz2[i, j] = si * g2[i, j]


@dataclass(frozen=True)
class PinnConfig:
    """Network and optimizer settings.

    The 2x20 tanh architecture, the learning rate and the Adam moments follow
    the reference setup; ``iterations`` defaults to the desk-scale 20k budget
    (reference-scale runs use 200k).
    """

    hidden_layers: int = 2
    hidden_width: int = 20
    lambda_physics: float = 1.0
    learning_rate: float = 1e-3
    iterations: int = 20_000
    collocation_points: int = 200
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    log_every: int = 200

    def validate(self) -> None:
        if self.hidden_layers < 1 or self.hidden_width < 1:
            raise ValidationError("network must have at least one hidden unit")
        if self.iterations < 1 or self.collocation_points < 1:
            raise ValidationError("iterations and collocation_points must be "
                                  "positive")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be positive")
        if self.lambda_physics < 0:
            raise ValidationError("lambda_physics must be nonnegative")


class TaylorMlp:
    """Fully-connected tanh net on a scalar input, with forward passes that
    optionally carry first and second derivatives w.r.t. the input."""

    def __init__(self, n_out: int, hidden_layers: int = 2, width: int = 20):
        self.sizes = [1] + [width] * hidden_layers + [n_out]
        self.shapes = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            self.shapes.append((fan_out, fan_in))
        self.n_params = sum(r * c + r for r, c in self.shapes)

    def init_params(self, seed: int) -> np.ndarray:
        """Xavier-uniform weights, zero biases."""
        rng = np.random.default_rng(seed)
        theta = np.zeros(self.n_params)
        for (rows, cols), (w_sl, _) in zip(self.shapes, self._slices()):
            limit = math.sqrt(6.0 / (rows + cols))
            theta[w_sl] = rng.uniform(-limit, limit, rows * cols)
        return theta

    def _slices(self):
        out, pos = [], 0
        for rows, cols in self.shapes:
            w_sl = slice(pos, pos + rows * cols)
            b_sl = slice(pos + rows * cols, pos + rows * cols + rows)
            out.append((w_sl, b_sl))
            pos = b_sl.stop
        return out

    def unpack(self, theta: np.ndarray):
        return [(theta[w_sl].reshape(rows, cols), theta[b_sl])
                for (rows, cols), (w_sl, b_sl) in zip(self.shapes, self._slices())]

    # -- plain value pass (used on observation rows) --

    def forward(self, theta: np.ndarray, tau: np.ndarray):
        layers = self.unpack(theta)
        a = tau[:, None]
        acts = [a]
        for W, b in layers[:-1]:
            a = np.tanh(a @ W.T + b)
            acts.append(a)
        W, b = layers[-1]
        out = a @ W.T + b
        return out, (layers, acts)

    def backward(self, cache, d_out: np.ndarray) -> np.ndarray:
        layers, acts = cache
        grad = np.zeros(self.n_params)
        slices = self._slices()
        g = d_out
        for li in range(len(layers) - 1, -1, -1):
            W, _ = layers[li]
            w_sl, b_sl = slices[li]
            grad[w_sl] += (g.T @ acts[li]).ravel()
            grad[b_sl] += g.sum(axis=0)
            if li == 0:
                break
            g = (g @ W) * (1.0 - acts[li] ** 2)
        return grad

    # -- Taylor pass carrying (u, du/dtau, d2u/dtau2) --
    #
    # The three channels are stacked into one (3m, k) matrix so every linear
    # layer costs a single GEMM; only the tanh blocks treat them separately.

    def forward_taylor(self, theta: np.ndarray, tau: np.ndarray):
        layers = self.unpack(theta)
        m = len(tau)
        a = np.zeros((3 * m, 1))
        a[:m, 0] = tau
        a[m:2 * m, 0] = 1.0
        cache = []
        for W, b in layers[:-1]:
            z = a @ W.T
            z[:m] += b
            z1, z2 = z[m:2 * m], z[2 * m:]
            u = np.empty_like(z1)
            s = np.empty_like(z1)
            nxt = np.empty((3 * m, W.shape[0]))
            _tanh_taylor(z[:m], z1, z2, u, s, nxt[m:2 * m], nxt[2 * m:])
            nxt[:m] = u
            cache.append((a, z1, z2, u, s))
            a = nxt
        W, b = layers[-1]
        cache.append(a)
        out = a @ W.T
        out[:m] += b
        return (out[:m], out[m:2 * m], out[2 * m:]), (layers, cache, m)

    def backward_taylor(self, cache, g0: np.ndarray, g1: np.ndarray,
                        g2: np.ndarray) -> np.ndarray:
        layers, tapes, m = cache
        slices = self._slices()
        grad = np.zeros(self.n_params)

        g = np.concatenate([g0, g1, g2], axis=0)
        W, _ = layers[-1]
        w_sl, b_sl = slices[-1]
        grad[w_sl] += (g.T @ tapes[-1]).ravel()
        grad[b_sl] += g[:m].sum(axis=0)
        g = g @ W

        for li in range(len(layers) - 2, -1, -1):
            a, z1, z2, u, s = tapes[li]
            dz = np.empty_like(g)
            _tanh_taylor_adjoint(np.ascontiguousarray(g[:m]),
                                 np.ascontiguousarray(g[m:2 * m]),
                                 np.ascontiguousarray(g[2 * m:]),
                                 z1, z2, u, s,
                                 dz[:m], dz[m:2 * m], dz[2 * m:])
            W, _ = layers[li]
            w_sl, b_sl = slices[li]
            grad[w_sl] += (dz.T @ a).ravel()
            grad[b_sl] += dz[:m].sum(axis=0)
            if li == 0:
                break
            g = dz @ W
        return grad


# --- ODE residuals ----------------------------------------------------------


def physics_residuals(kind: ExperimentKind, th: np.ndarray, th_d: np.ndarray,
                      th_dd: np.ndarray, constants: dict):
    """Equation-of-motion residuals and their partial derivatives.

    ``th``/``th_d``/``th_dd`` are physical values/first/second derivatives of
    the fitted coordinates, shaped (m, n_out).  Returns ``(res, d_th, d_thd,
    d_thdd)`` where ``res`` is (m, n_eq) and each partial is
    (m, n_eq, n_out).  Coupled-pendulum residuals come pre-divided by their
    inertia so every equation has angular-acceleration units.
    """
    m, n_out = th.shape
    g = constants["g"]

    if kind in (ExperimentKind.FALLING_BALL, ExperimentKind.BOUNCING_BALL):
        res = th_dd + g  # y'' + g = 0
        d_th = np.zeros((m, 1, 1))
        d_thd = np.zeros((m, 1, 1))
        d_thdd = np.ones((m, 1, 1))
        return res, d_th, d_thd, d_thdd

    if kind == ExperimentKind.PROJECTILE:
        res = np.column_stack([th_dd[:, 0], th_dd[:, 1] + g])  # x''=0, y''+g=0
        d_th = np.zeros((m, 2, 2))
        d_thd = np.zeros((m, 2, 2))
        d_thdd = np.zeros((m, 2, 2))
        d_thdd[:, 0, 0] = 1.0
        d_thdd[:, 1, 1] = 1.0
        return res, d_th, d_thd, d_thdd

    if kind in (ExperimentKind.HOLONOMIC_PENDULUM,
                ExperimentKind.NON_HOLONOMIC_PENDULUM):
        length = constants["length"]
        res = th_dd + (g / length) * np.sin(th)  # theta'' + (g/l) sin = 0
        d_th = ((g / length) * np.cos(th))[:, :, None]
        d_thd = np.zeros((m, 1, 1))
        d_thdd = np.ones((m, 1, 1))
        return res, d_th, d_thd, d_thdd

    if kind == ExperimentKind.DOUBLE_PENDULUM:
        l1, l2 = constants["length_1"], constants["length_2"]
        mu = constants["mass_ratio"]
        c1 = mu * l2 / ((1.0 + mu) * l1)
        c2 = l1 / l2
        th1, th2 = th[:, 0], th[:, 1]
        w1, w2 = th_d[:, 0], th_d[:, 1]
        a1, a2 = th_dd[:, 0], th_dd[:, 1]
        delta = th1 - th2
        cd, sd = np.cos(delta), np.sin(delta)

        r1 = a1 + c1 * (a2 * cd + w2 ** 2 * sd) + (g / l1) * np.sin(th1)
        r2 = a2 + c2 * (a1 * cd - w1 ** 2 * sd) + (g / l2) * np.sin(th2)
        res = np.column_stack([r1, r2])

        d_th = np.zeros((m, 2, 2))
        cross1 = c1 * (-a2 * sd + w2 ** 2 * cd)
        cross2 = c2 * (-a1 * sd - w1 ** 2 * cd)
        d_th[:, 0, 0] = cross1 + (g / l1) * np.cos(th1)
        d_th[:, 0, 1] = -cross1
        d_th[:, 1, 0] = cross2
        d_th[:, 1, 1] = -cross2 + (g / l2) * np.cos(th2)

        d_thd = np.zeros((m, 2, 2))
        d_thd[:, 0, 1] = 2.0 * c1 * w2 * sd
        d_thd[:, 1, 0] = -2.0 * c2 * w1 * sd

        d_thdd = np.zeros((m, 2, 2))
        d_thdd[:, 0, 0] = 1.0
        d_thdd[:, 0, 1] = c1 * cd
        d_thdd[:, 1, 0] = c2 * cd
        d_thdd[:, 1, 1] = 1.0
        return res, d_th, d_thd, d_thdd

    raise ValidationError(f"no physics residual for {kind}")


def physics_loss(kind: ExperimentKind, th, th_d, th_dd, constants: dict) -> float:
    """Mean squared ODE residual over the supplied points (physical units)."""
    def cols(a):
        a = np.asarray(a, dtype=float)
        return a[:, None] if a.ndim == 1 else a
    res, *_ = physics_residuals(kind, cols(th), cols(th_d), cols(th_dd), constants)
    return float(np.mean(np.sum(res ** 2, axis=1)))


# --- training problem -------------------------------------------------------


@dataclass
class PinnProblem:
    """Normalized data, collocation grid and scaling for one fit."""

    kind: ExperimentKind
    net: TaylorMlp
    tau_obs: np.ndarray      # observation times in [0, 1]
    q_norm: np.ndarray       # normalized observations, (n, n_out)
    tau_col: np.ndarray      # collocation times in [0, 1]
    t_scale: float           # seconds per unit tau
    out_mean: np.ndarray     # (n_out,)
    out_scale: np.ndarray    # (n_out,)
    constants: dict
    lambda_physics: float
    res_scale: np.ndarray    # (n_eq,) residual -> dimensionless factors

    def loss_and_grad(self, theta: np.ndarray):
        net = self.net
        n_obs = len(self.tau_obs)
        m_col = len(self.tau_col)

        u_obs, cache_obs = net.forward(theta, self.tau_obs)
        err = u_obs - self.q_norm
        loss_data = float(np.sum(err ** 2)) / n_obs
        grad = net.backward(cache_obs, (2.0 / n_obs) * err)

        (u0, u1, u2), cache_col = net.forward_taylor(theta, self.tau_col)
        th = self.out_mean + self.out_scale * u0
        th_d = self.out_scale * u1 / self.t_scale
        th_dd = self.out_scale * u2 / self.t_scale ** 2
        res, d_th, d_thd, d_thdd = physics_residuals(self.kind, th, th_d,
                                                     th_dd, self.constants)
        res_n = res * self.res_scale
        loss_phys = float(np.sum(res_n ** 2)) / m_col

        d_res = (2.0 / m_col) * res_n * self.res_scale  # dL_phys / d res
        g_th = np.einsum("me,meo->mo", d_res, d_th)
        g_thd = np.einsum("me,meo->mo", d_res, d_thd)
        g_thdd = np.einsum("me,meo->mo", d_res, d_thdd)
        lam = self.lambda_physics
        grad += net.backward_taylor(
            cache_col,
            lam * g_th * self.out_scale,
            lam * g_thd * self.out_scale / self.t_scale,
            lam * g_thdd * self.out_scale / self.t_scale ** 2,
        )
        total = loss_data + lam * loss_phys
        return total, loss_data, loss_phys, grad


def build_problem(times: np.ndarray, values: np.ndarray, kind: ExperimentKind,
                  constants: dict, cfg: PinnConfig) -> PinnProblem:
    """Normalize a coordinate series and set up the training problem.

    Time maps to [0, 1]; each coordinate is shifted/scaled to zero mean and
    unit standard deviation (the tanh net saturates on raw second/meter
    scales).  ODE residuals are evaluated in physical units and rescaled by
    t_scale^2 / out_scale so they stay O(1) in the loss.
    """
    cfg.validate()
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if len(times) != len(values):
        raise ValidationError("times and values must have equal length")
    if len(times) < 4:
        raise ValidationError("need at least 4 observations to fit")

    t0 = times[0]
    t_scale = times[-1] - times[0]
    if t_scale <= 0:
        raise ValidationError("times must span a positive duration")
    out_mean = values.mean(axis=0)
    out_scale = values.std(axis=0)
    if np.any(out_scale == 0):
        raise DegenerateTrajectoryError(
            "a fitted coordinate has zero variance (still trajectory)")

    # Residuals are computed in physical units and rescaled by the natural
    # unit of their own equation, divided by the data scale, so every
    # equation contributes O(1) terms.  Ballistic residuals use the data's
    # curvature scale out_scale / T^2; pendulum residuals use their restoring
    # scale (g/l) * out_scale, which keeps the physics term from swamping the
    # data term on multi-period clips (theta == 0 solves the ODE exactly, so
    # an overweighted pendulum residual traps the optimizer there).
    g = constants["g"]
    if kind in (ExperimentKind.HOLONOMIC_PENDULUM,
                ExperimentKind.NON_HOLONOMIC_PENDULUM):
        res_scale = np.array([constants["length"] / (g * out_scale[0])])
    elif kind == ExperimentKind.DOUBLE_PENDULUM:
        res_scale = np.array([constants["length_1"] / (g * out_scale[0]),
                              constants["length_2"] / (g * out_scale[1])])
    else:
        n_eq = 2 if kind == ExperimentKind.PROJECTILE else 1
        res_scale = t_scale ** 2 / out_scale[:n_eq]

    net = TaylorMlp(values.shape[1], cfg.hidden_layers, cfg.hidden_width)
    return PinnProblem(
        kind=kind, net=net,
        tau_obs=(times - t0) / t_scale,
        q_norm=(values - out_mean) / out_scale,
        tau_col=np.linspace(0.0, 1.0, cfg.collocation_points),
        t_scale=t_scale, out_mean=out_mean, out_scale=out_scale,
        constants=dict(constants), lambda_physics=cfg.lambda_physics,
        res_scale=res_scale,
    )


# --- metrics ----------------------------------------------------------------


def nmse(pred, truth) -> float:
    """Mean squared error over the variance of the truth, averaged per
    coordinate for multi-coordinate inputs."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise ValidationError(f"shape mismatch: {pred.shape} vs {truth.shape}")
    if pred.ndim == 1:
        pred, truth = pred[:, None], truth[:, None]
    out = []
    for k in range(truth.shape[1]):
        var = np.mean((truth[:, k] - truth[:, k].mean()) ** 2)
        if var == 0:
            raise DegenerateTrajectoryError(
                "reference series has zero variance (still trajectory)")
        out.append(float(np.mean((pred[:, k] - truth[:, k]) ** 2) / var))
    return float(np.mean(out))


def dynamical_score(nmse_value: float) -> float:
    """clamp(1 - NMSE, 0, 1)."""
    if nmse_value < 0:
        raise ValidationError("NMSE cannot be negative")
    return float(min(max(1.0 - nmse_value, 0.0), 1.0))


# --- training ---------------------------------------------------------------


@dataclass(frozen=True)
class PinnModel:
    """Trained network plus its normalization, evaluable at physical times."""

    net: TaylorMlp
    params: np.ndarray
    t0: float
    t_scale: float
    out_mean: np.ndarray
    out_scale: np.ndarray

    def eval_with_time_derivatives(self, t):
        """(u, du/dt, d2u/dt2) in physical units at physical times ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        tau = (t - self.t0) / self.t_scale
        (u0, u1, u2), _ = self.net.forward_taylor(self.params, tau)
        u = self.out_mean + self.out_scale * u0
        du = self.out_scale * u1 / self.t_scale
        d2u = self.out_scale * u2 / self.t_scale ** 2
        return u, du, d2u

    def predict(self, t) -> np.ndarray:
        return self.eval_with_time_derivatives(t)[0]


@dataclass(frozen=True)
class PinnFit:
    model: PinnModel
    times: np.ndarray
    observed: np.ndarray
    predicted: np.ndarray
    loss_data: float
    loss_physics: float
    nmse_per_coordinate: tuple
    nmse: float
    dynamical_score: float
    history: np.ndarray  # columns: iteration, L_data, L_physics


def train_pinn(times, values, kind: ExperimentKind, constants: dict,
               cfg: PinnConfig | None = None) -> PinnFit:
    """Fit the physics-informed network to one coordinate series.

    Deterministic given ``cfg.seed``.  Raises :class:`TrainingError` when the
    loss stops being finite.
    """
    cfg = cfg or PinnConfig()
    problem = build_problem(times, values, kind, constants, cfg)
    net = problem.net
    theta = net.init_params(cfg.seed)

    m1 = np.zeros_like(theta)
    m2 = np.zeros_like(theta)
    b1, b2, eps = cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps
    b1_t = b2_t = 1.0
    lr = cfg.learning_rate
    history = []

    for it in range(1, cfg.iterations + 1):
        total, l_data, l_phys, grad = problem.loss_and_grad(theta)
        if not math.isfinite(total):
            raise TrainingError(
                f"loss diverged at iteration {it}: "
                f"L_data={l_data}, L_physics={l_phys}")
        if it == 1 or it % cfg.log_every == 0 or it == cfg.iterations:
            history.append((it, l_data, l_phys))
        b1_t *= b1
        b2_t *= b2
        m1 = b1 * m1 + (1.0 - b1) * grad
        m2 = b2 * m2 + (1.0 - b2) * grad ** 2
        theta = theta - lr * (m1 / (1.0 - b1_t)) / (np.sqrt(m2 / (1.0 - b2_t)) + eps)

    model = PinnModel(net=net, params=theta, t0=float(np.asarray(times)[0]),
                      t_scale=problem.t_scale, out_mean=problem.out_mean,
                      out_scale=problem.out_scale)

    observed = np.asarray(values, dtype=float)
    if observed.ndim == 1:
        observed = observed[:, None]
    predicted = model.predict(times)
    per_coord = tuple(
        nmse(predicted[:, k], observed[:, k]) for k in range(observed.shape[1]))
    combined = float(np.mean(per_coord))
    total, l_data, l_phys, _ = problem.loss_and_grad(theta)
    return PinnFit(
        model=model, times=np.asarray(times, dtype=float), observed=observed,
        predicted=predicted, loss_data=l_data, loss_physics=l_phys,
        nmse_per_coordinate=per_coord, nmse=combined,
        dynamical_score=dynamical_score(combined),
        history=np.asarray(history),
    )


# --- trajectory-level entry point -------------------------------------------


def detect_flight_spans(traj: Trajectory) -> list[tuple[int, int]]:
    """[lo, hi) index ranges between ground impacts of a bouncing ball.

    Impacts show up as a vertical-velocity sign reversal from downward to
    upward between consecutive samples.
    """
    y = traj.metric_positions()[:, 1]
    vy = central_difference(y, traj.t)
    impacts = [i + 1 for i in range(len(vy) - 1)
               if vy[i] < 0 and vy[i + 1] > 0]
    bounds = [0] + impacts + [len(y)]
    return [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi - lo >= 2]


def fit_trajectory(traj: Trajectory, spec: ExperimentSpec,
                   cfg: PinnConfig | None = None) -> PinnFit:
    """Extract the fitted coordinates for the experiment kind and train.

    Balls fit Cartesian coordinates (the bouncing ball only on its longest
    inter-bounce span, where the free-fall equation holds); pendulums fit the
    unwrapped angle(s) about the pivot.
    """
    from .invariants import double_pendulum_angles, estimate_pivot

    cfg = cfg or PinnConfig()
    spec.validate()
    kind = spec.kind
    pos = traj.metric_positions()
    t = traj.t

    if kind == ExperimentKind.FALLING_BALL:
        return train_pinn(t, pos[:, 1], kind, {"g": spec.g}, cfg)

    if kind == ExperimentKind.BOUNCING_BALL:
        spans = detect_flight_spans(traj)
        lo, hi = max(spans, key=lambda s: s[1] - s[0])
        if hi - lo < 4:
            raise ValidationError("no usable inter-bounce span")
        return train_pinn(t[lo:hi], pos[lo:hi, 1], kind, {"g": spec.g}, cfg)

    if kind == ExperimentKind.PROJECTILE:
        return train_pinn(t, pos, kind, {"g": spec.g}, cfg)

    if kind in (ExperimentKind.HOLONOMIC_PENDULUM,
                ExperimentKind.NON_HOLONOMIC_PENDULUM):
        if spec.pivot is not None:
            pivot, radius = tuple(spec.pivot), None
        else:
            est = estimate_pivot(traj)
            pivot, radius = est.center, est.radius
        dx = pos[:, 0] - pivot[0]
        dy = pos[:, 1] - pivot[1]
        theta = np.unwrap(np.arctan2(dx, -dy))
        length = spec.length if spec.length is not None else (
            radius if radius is not None else float(np.median(np.hypot(dx, dy))))
        return train_pinn(t, theta, kind, {"g": spec.g, "length": length}, cfg)

    if kind == ExperimentKind.DOUBLE_PENDULUM:
        if spec.pivot is not None:
            pivot = tuple(spec.pivot)
        else:
            pivot = estimate_pivot(traj).center
        th1, th2, len1, len2 = double_pendulum_angles(traj, pivot)
        constants = {
            "g": spec.g,
            "length_1": spec.length_1 if spec.length_1 is not None
            else float(np.median(len1)),
            "length_2": spec.length_2 if spec.length_2 is not None
            else float(np.median(len2)),
            "mass_ratio": spec.mass_ratio,
        }
        return train_pinn(t, np.column_stack([th1, th2]), kind, constants, cfg)

    raise ValidationError(f"unknown experiment kind {kind}")  # pragma: no cover
