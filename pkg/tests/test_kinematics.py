import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from physbench.errors import ConfigError, ValidationError
from physbench.kinematics import (
    blend_velocity,
    central_difference,
    estimate_kinematics,
    regression_window_bounds,
    savitzky_golay,
    window_regression_slope,
)
from physbench.types import ExperimentKind, KinematicsConfig, Trajectory

G = 9.81


def make_traj(t, x, y, **kw):
    n = len(t)
    defaults = dict(visible=np.ones(n, bool), object_count=np.ones(n, int),
                    fps=1.0 / np.median(np.diff(t)),
                    experiment=ExperimentKind.FALLING_BALL)
    defaults.update(kw)
    return Trajectory(t=t, x=x, y=y, **defaults)


class TestCentralDifference:
    def test_constant_series(self):
        out = central_difference([5, 5, 5, 5], [0, 1, 2, 3])
        np.testing.assert_array_equal(out, np.zeros(4))

    def test_quadratic_interior_exact(self):
        t = np.arange(11) * 0.1
        out = central_difference(t ** 2, t)
        # central differences are exact for quadratics at interior points
        np.testing.assert_allclose(out[1:-1], 2 * t[1:-1], rtol=1e-9)

    def test_three_points_forced_by_formulas(self):
        out = central_difference([0, 1, 4], [0, 1, 2])
        np.testing.assert_allclose(out, [1, 2, 3])

    def test_too_short(self):
        with pytest.raises(ValidationError):
            central_difference([1, 2], [0, 1])

    def test_nonmonotone_times(self):
        with pytest.raises(ValidationError):
            central_difference([1, 2, 3], [0, 2, 2])


class TestWindowRegression:
    def test_linear_any_window(self):
        t = np.linspace(0, 2, 21)
        x = 3 * t + 1
        for w in (3, 5, 7, 21):
            np.testing.assert_allclose(window_regression_slope(x, t, w),
                                       np.full(21, 3.0), rtol=1e-12)

    def test_matches_normal_equation_oracle(self):
        rng = np.random.default_rng(7)
        t = np.arange(40) * 0.05
        x = t ** 2 + rng.normal(0, 0.01, 40)
        got = window_regression_slope(x, t, 5)
        # independent per-window oracle: lstsq on the [t, 1] design matrix
        expected = np.empty_like(got)
        for i in range(len(t)):
            lo, hi = regression_window_bounds(i, len(t), 5)
            A = np.column_stack([t[lo:hi], np.ones(hi - lo)])
            expected[i] = np.linalg.lstsq(A, x[lo:hi], rcond=None)[0][0]
        np.testing.assert_allclose(got, expected, atol=1e-9, rtol=0)

    def test_full_length_window_repeats_global_slope(self):
        t = np.linspace(0, 1, 9)
        x = 3 * t + 1
        out = window_regression_slope(x, t, 9)
        np.testing.assert_allclose(out, np.full(9, 3.0), rtol=1e-12)

    def test_even_window_rejected(self):
        with pytest.raises(ConfigError):
            window_regression_slope([1, 2, 3, 4], [0, 1, 2, 3], 4)

    def test_window_exceeding_length_rejected(self):
        with pytest.raises(ConfigError):
            window_regression_slope([1, 2, 3], [0, 1, 2], 5)


class TestBlend:
    def test_default_weighting(self):
        np.testing.assert_allclose(blend_velocity([1.0], [0.0], 0.7), [0.7])

    def test_alpha_extremes(self):
        v_reg = np.array([1.0, 2.0])
        v_cd = np.array([5.0, 6.0])
        np.testing.assert_array_equal(blend_velocity(v_reg, v_cd, 1.0), v_reg)
        np.testing.assert_array_equal(blend_velocity(v_reg, v_cd, 0.0), v_cd)

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            blend_velocity([1.0, 2.0], [1.0], 0.5)


class TestSavitzkyGolay:
    def test_constant_unchanged(self):
        x = np.full(15, 4.2)
        np.testing.assert_allclose(savitzky_golay(x, 5, 3), x, rtol=1e-12)

    def test_cubic_reproduced_everywhere(self):
        t = np.linspace(-1, 2, 50)
        x = 0.3 * t ** 3 - 1.2 * t ** 2 + 0.5 * t + 2.0
        out = savitzky_golay(x, 7, 3)
        np.testing.assert_allclose(out, x, rtol=1e-9, atol=1e-12)

    def test_window5_order3_interior_weights(self):
        # independent oracle: solve the 5-point normal equations directly
        offsets = np.arange(-2, 3, dtype=float)
        V = np.vander(offsets, N=4, increasing=True)
        oracle = np.linalg.solve(V.T @ V, V.T)[0]
        classic = np.array([-3, 12, 17, 12, -3]) / 35.0
        np.testing.assert_allclose(oracle, classic, atol=1e-12)
        # the filter's interior response to a unit impulse is that kernel
        impulse = np.zeros(11)
        impulse[5] = 1.0
        out = savitzky_golay(impulse, 5, 3)
        np.testing.assert_allclose(out[3:8], classic, atol=1e-12)

    def test_window_not_exceeding_order_rejected(self):
        with pytest.raises(ConfigError):
            savitzky_golay(np.arange(10.0), 3, 3)

    def test_even_window_rejected(self):
        with pytest.raises(ConfigError):
            savitzky_golay(np.arange(10.0), 4, 2)


class TestEstimateKinematics:
    def test_free_fall_mean_acceleration(self):
        # 0.5 s at 120 fps; the one-sided endpoint differences mandate a
        # +g/2 bias on a[0] and +g/4 on a[1] (both ends), which floors the
        # achievable mean error near 2.4% at this length.
        fps, n = 120.0, 61
        t = np.arange(n) / fps
        traj = make_traj(t, np.zeros(n), 2.0 - 0.5 * G * t ** 2)
        kin = estimate_kinematics(traj)
        assert abs(kin.acc[:, 1].mean() + G) / G < 0.03

    def test_constant_position(self):
        t = np.arange(30) / 60.0
        traj = make_traj(t, np.full(30, 1.0), np.full(30, 2.0))
        kin = estimate_kinematics(traj)
        np.testing.assert_allclose(kin.vel, 0.0, atol=1e-12)
        np.testing.assert_allclose(kin.acc, 0.0, atol=1e-12)

    def test_uniform_motion(self):
        t = np.arange(50) / 100.0
        traj = make_traj(t, 2.0 * t, np.ones(50))
        kin = estimate_kinematics(traj)
        np.testing.assert_allclose(kin.vel[:, 0], 2.0, atol=1e-6)
        np.testing.assert_allclose(kin.acc, 0.0, atol=1e-6)

    def test_output_lengths_match_input(self):
        t = np.arange(12) / 24.0
        traj = make_traj(t, np.sin(t), np.cos(t))
        kin = estimate_kinematics(traj)
        assert kin.pos.shape == kin.vel.shape == kin.acc.shape == (12, 2)

    @settings(max_examples=25, deadline=None)
    @given(scale=st.floats(min_value=1e-3, max_value=1e3),
           seed=st.integers(min_value=0, max_value=2 ** 16))
    def test_commutes_with_spatial_scaling(self, scale, seed):
        rng = np.random.default_rng(seed)
        t = np.arange(20) / 50.0
        x = np.cumsum(rng.normal(0, 0.1, 20))
        y = np.cumsum(rng.normal(0, 0.1, 20))
        base = estimate_kinematics(make_traj(t, x, y))
        scaled = estimate_kinematics(make_traj(t, scale * x, scale * y))
        np.testing.assert_allclose(scaled.vel, scale * base.vel,
                                   rtol=1e-9, atol=1e-12 * scale)
        np.testing.assert_allclose(scaled.acc, scale * base.acc,
                                   rtol=1e-9, atol=1e-12 * scale)

    def test_pixel_ydown_input_converted(self):
        fps, n = 120.0, 61
        t = np.arange(n) / fps
        ppm = 350.0
        y_m = 2.0 - 0.5 * G * t ** 2
        traj = make_traj(t, np.full(n, 200.0), 700.0 - ppm * y_m,
                         unit="pixels", y_axis="down", pixels_per_meter=ppm)
        kin = estimate_kinematics(traj)
        assert abs(kin.acc[:, 1].mean() + G) / G < 0.03

    def test_invisible_samples_rejected(self):
        t = np.arange(10) / 20.0
        visible = np.ones(10, bool)
        visible[4] = False
        traj = make_traj(t, t, t, visible=visible)
        with pytest.raises(ValidationError):
            estimate_kinematics(traj)

    def test_jittered_timestamps_rejected(self):
        t = np.arange(20) / 40.0
        t[10] += 0.01  # 40% of the frame interval
        traj = make_traj(t, t, t, fps=40.0)
        with pytest.raises(ValidationError):
            estimate_kinematics(traj)

    def test_too_short_rejected(self):
        t = np.arange(5) / 20.0
        with pytest.raises(ValidationError):
            estimate_kinematics(make_traj(t, t, t))

    def test_bad_config_rejected(self):
        t = np.arange(20) / 40.0
        traj = make_traj(t, t, t)
        with pytest.raises(ConfigError):
            estimate_kinematics(traj, KinematicsConfig(sg_window=3, sg_order=3))
