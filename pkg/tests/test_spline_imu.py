import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from indoorsim.geometry import RigidTransform, so3_right_jacobian, so3_right_jacobian_dot
from indoorsim.imu import GRAVITY, ImuConfig, ImuNoise, add_imu_noise, synthesize_imu
from indoorsim.spline import PoseSpline, fit_spline


def make_channel_spline(ts, fn) -> PoseSpline:
    chan = np.zeros((len(ts), 6))
    chan[:, :3] = np.array([fn(t) for t in ts])
    return fit_spline(ts, chan)


class TestFitSpline:
    def test_collinear_positions_reproduce_line(self):
        ts = np.linspace(0, 3, 4)
        chan = np.zeros((4, 6))
        chan[:, 0] = 2.0 * ts + 1.0
        sp = fit_spline(ts, chan)
        for t in np.linspace(0, 3, 50):
            assert sp.eval(t, 0)[0] == pytest.approx(2.0 * t + 1.0, abs=1e-12)

    def test_cubic_reproduced_exactly(self):
        ts = np.linspace(0, 2, 9)
        chan = np.zeros((9, 6))
        chan[:, 1] = ts ** 3
        sp = fit_spline(ts, chan)
        for t in np.linspace(0, 2, 33):
            assert sp.eval(t, 0)[1] == pytest.approx(t ** 3, abs=1e-10)

    def test_interpolates_controls_to_1e9(self):
        rng = np.random.default_rng(3)
        ts = np.linspace(0, 5, 26)
        chan = rng.normal(size=(26, 6)) * 0.5
        sp = fit_spline(ts, chan)
        vals = sp.eval(ts, 0)
        assert np.abs(vals - _unwrapped(chan)).max() < 1e-9

    def test_rotation_across_pi_unwraps(self):
        # steady yaw sweeping through pi: fit must not jump
        ts = np.linspace(0, 4, 21)
        poses = []
        for t in ts:
            poses.append(RigidTransform(rotation=Rotation.from_euler("z", 0.9 * t).as_rotvec()))
        sp = fit_spline(ts, poses)
        rv = sp.eval(ts, 0)[:, 3:]
        assert np.abs(np.diff(rv[:, 2])).max() < np.pi  # no silent jump
        # angle at the end matches 0.9*4 rad (unwrapped past pi)
        assert rv[-1, 2] == pytest.approx(3.6, abs=1e-9)

    def test_too_few_poses(self):
        with pytest.raises(ValueError, match="4"):
            fit_spline([0, 1, 2], np.zeros((3, 6)))

    def test_non_uniform_rejected(self):
        with pytest.raises(ValueError, match="uniform"):
            fit_spline([0, 1, 2.5, 3], np.zeros((4, 6)))

    def test_genuine_pi_jump_rejected(self):
        ts = np.linspace(0, 3, 4)
        chan = np.zeros((4, 6))
        chan[1, 3:] = [3.1, 0, 0]
        chan[2, 3:] = [0, 3.1, 0]  # ~180 deg apart around different axes
        with pytest.raises(ValueError, match="unwrap"):
            fit_spline(ts, chan)


def _unwrapped(chan):
    from indoorsim.geometry import unwrap_rotvecs

    out = chan.copy()
    out[:, 3:] = unwrap_rotvecs(chan[:, 3:])
    return out


class TestEval:
    def test_constant_pose_zero_derivatives(self):
        ts = np.linspace(0, 1, 6)
        chan = np.tile(np.array([1.0, 2.0, 3.0, 0.1, 0.2, 0.3]), (6, 1))
        sp = fit_spline(ts, chan)
        assert np.allclose(sp.eval(0.5, 1), 0.0, atol=1e-12)
        assert np.allclose(sp.eval(0.5, 2), 0.0, atol=1e-10)

    def test_first_derivative_vs_finite_difference(self):
        rng = np.random.default_rng(7)
        ts = np.linspace(0, 4, 41)
        chan = np.cumsum(rng.normal(size=(41, 6)), axis=0) * 0.05
        sp = fit_spline(ts, chan)
        h = 1e-5
        for t in np.linspace(0.5, 3.5, 11):
            fd = (sp.eval(t + h, 0) - sp.eval(t - h, 0)) / (2 * h)
            an = sp.eval(t, 1)
            denom = max(np.abs(fd).max(), 1e-9)
            assert np.abs(an - fd).max() / denom < 1e-6

    def test_second_derivative_of_parabola(self):
        ts = np.linspace(0, 2, 11)
        sp = make_channel_spline(ts, lambda t: [0.5 * t * t, 0.0, 0.0])
        for t in np.linspace(0.2, 1.8, 9):
            d2 = sp.eval(t, 2)
            assert d2[0] == pytest.approx(1.0, abs=1e-9)
            assert abs(d2[1]) < 1e-9

    def test_outside_span_raises(self):
        sp = make_channel_spline(np.linspace(0, 1, 5), lambda t: [t, 0, 0])
        with pytest.raises(ValueError, match="span"):
            sp.eval(1.5, 0)
        with pytest.raises(ValueError):
            sp.eval(-0.1, 1)


def circle_spline(radius=2.0, omega=0.5, span=12.0, rate=50.0, height=0.0):
    """Constant-speed circle, body yawing with the motion."""
    n = int(span * rate) + 1
    ts = np.arange(n) / rate
    chan = np.zeros((n, 6))
    chan[:, 0] = radius * np.cos(omega * ts)
    chan[:, 1] = radius * np.sin(omega * ts)
    chan[:, 2] = height
    chan[:, 5] = omega * ts  # yaw tracks the angular position (unwrapped)
    return fit_spline(ts, chan), ts


class TestImu:
    def test_static_gravity_only(self):
        ts = np.linspace(0, 1, 9)
        chan = np.tile(np.array([0.5, -0.2, 1.0, 0, 0, 0]), (9, 1))
        sp = fit_spline(ts, chan)
        samples = synthesize_imu(sp, ImuConfig(rate=200))
        for s in samples[:: len(samples) // 10]:
            assert np.allclose(s.accel, [0, 0, 9.81], atol=1e-9)
            assert np.allclose(s.gyro, 0.0, atol=1e-10)

    def test_sample_count_and_spacing(self):
        ts = np.linspace(0, 2.0, 11)
        sp = make_channel_spline(ts, lambda t: [t, 0, 0])
        samples = synthesize_imu(sp, ImuConfig(rate=800))
        assert len(samples) == int(np.floor(2.0 * 800)) + 1
        stamps = np.array([s.timestamp for s in samples])
        k = np.arange(len(samples))
        assert np.abs(stamps - k / 800.0).max() < 1e-12

    def test_circle_centripetal_and_yaw_rate(self):
        sp, _ = circle_spline(radius=2.0, omega=0.5)
        samples = synthesize_imu(sp, ImuConfig(rate=800))
        # skip the spline ends where not-a-knot boundary wiggles live
        inner = [s for s in samples if 1.0 < s.timestamp < 11.0]
        expected = 0.5 ** 2 * 2.0  # Omega^2 r
        for s in inner[:: len(inner) // 25]:
            a_in_plane = s.accel.copy()
            a_in_plane[2] -= 9.81
            assert np.linalg.norm(a_in_plane) == pytest.approx(expected, rel=1e-3)
            assert s.gyro[2] == pytest.approx(0.5, rel=1e-3)
            assert abs(s.gyro[0]) < 1e-3 and abs(s.gyro[1]) < 1e-3

    def test_gyro_vs_rotation_finite_difference(self):
        # smooth spline with the rate bounded away from zero so the forward
        # difference's O(h) truncation stays below the 1e-5 relative budget
        ts = np.linspace(0, 6, 121)
        chan = np.zeros((121, 6))
        chan[:, 3] = 0.08 * np.sin(0.5 * ts)
        chan[:, 4] = 0.06 * np.sin(0.4 * ts + 0.9)
        chan[:, 5] = 0.5 * ts
        sp = fit_spline(ts, chan)
        samples = synthesize_imu(sp, ImuConfig(rate=100))
        h = 1e-5
        for s in samples[60:-60:40]:
            r_t = Rotation.from_rotvec(sp.eval(s.timestamp, 0)[3:]).as_matrix()
            r_th = Rotation.from_rotvec(sp.eval(s.timestamp + h, 0)[3:]).as_matrix()
            omega_fd = Rotation.from_matrix(r_t.T @ r_th).as_rotvec() / h
            assert np.abs(s.gyro - omega_fd).max() / np.linalg.norm(omega_fd) < 1e-5

    def test_extrinsic_lever_arm_vs_finite_difference(self):
        # IMU mounted 10 cm off the camera: accel must include lever-arm terms
        sp, _ = circle_spline(radius=1.5, omega=0.8, span=8.0)
        extr = RigidTransform(rotation=[0.0, 0.0, 0.3], translation=[0.1, -0.05, 0.02])
        cfg = ImuConfig(rate=200, imu_from_camera=extr)
        samples = synthesize_imu(sp, cfg)
        t_cb = extr.inverse()
        h = 1e-4

        def body_pos(t):
            v = sp.eval(t, 0)
            r_wc = Rotation.from_rotvec(v[3:]).as_matrix()
            return v[:3] + r_wc @ t_cb.translation

        for s in samples[200:-200:150]:
            t = s.timestamp
            acc_fd = (body_pos(t + h) - 2 * body_pos(t) + body_pos(t - h)) / h ** 2
            v = sp.eval(t, 0)
            r_wb = Rotation.from_rotvec(v[3:]).as_matrix() @ t_cb.matrix
            f_expected = r_wb.T @ (acc_fd - GRAVITY)
            assert np.abs(s.accel - f_expected).max() < 5e-3

    def test_dead_reckoning_under_1cm(self):
        # 10 s gentle trajectory, < 1 m/s; trapezoidal integration of the
        # noiseless samples must land within 1 cm
        ts = np.linspace(0, 10, 251)
        chan = np.zeros((251, 6))
        chan[:, 0] = 0.8 * np.sin(0.4 * ts)
        chan[:, 1] = 0.5 * np.sin(0.3 * ts + 1.0)
        chan[:, 2] = 0.2 * np.sin(0.5 * ts)
        chan[:, 5] = 0.4 * np.sin(0.25 * ts)
        sp = fit_spline(ts, chan)
        samples = synthesize_imu(sp, ImuConfig(rate=800))
        drift = dead_reckon_error(sp, samples)
        assert drift < 0.01

    def test_noise_scaling_law(self):
        ts = np.linspace(0, 125, 1001)
        chan = np.zeros((1001, 6))
        sp = fit_spline(ts, chan)
        samples = synthesize_imu(sp, ImuConfig(rate=800))
        assert len(samples) >= 100_000
        sigma_g = 1.7e-4
        noisy = add_imu_noise(samples, ImuNoise(gyro_noise_density=sigma_g, seed=5))
        gyro = np.array([s.gyro for s in noisy])
        dt = 1.0 / 800
        expected = sigma_g / np.sqrt(dt)
        for axis in range(3):
            assert np.std(gyro[:, axis]) == pytest.approx(expected, rel=0.03)

    def test_noise_zero_identity_and_seed_determinism(self):
        sp, _ = circle_spline(span=2.0)
        samples = synthesize_imu(sp, ImuConfig(rate=100))
        quiet = add_imu_noise(samples, ImuNoise())
        for a, b in zip(samples, quiet):
            assert np.array_equal(a.gyro, b.gyro)
            assert np.array_equal(a.accel, b.accel)
        n1 = add_imu_noise(samples, ImuNoise(gyro_noise_density=1e-3, accel_noise_density=1e-2, seed=9))
        n2 = add_imu_noise(samples, ImuNoise(gyro_noise_density=1e-3, accel_noise_density=1e-2, seed=9))
        for a, b in zip(n1, n2):
            assert np.array_equal(a.gyro, b.gyro)
            assert np.array_equal(a.accel, b.accel)


def dead_reckon_error(sp: PoseSpline, samples) -> float:
    """Trapezoidal strapdown integration from the true initial state."""
    dt = samples[1].timestamp - samples[0].timestamp
    v0 = sp.eval(sp.t_min, 1)[:3]
    p = sp.eval(sp.t_min, 0)[:3].copy()
    r = Rotation.from_rotvec(sp.eval(sp.t_min, 0)[3:]).as_matrix()
    v = v0.copy()
    for k in range(len(samples) - 1):
        s0, s1 = samples[k], samples[k + 1]
        r_mid = r @ Rotation.from_rotvec(0.5 * dt * s0.gyro).as_matrix()
        r_next = r @ Rotation.from_rotvec(dt * 0.5 * (s0.gyro + s1.gyro)).as_matrix()
        a0 = r @ s0.accel + GRAVITY
        a1 = r_next @ s1.accel + GRAVITY
        a_mid = r_mid @ (0.5 * (s0.accel + s1.accel)) + GRAVITY
        p = p + v * dt + 0.5 * a_mid * dt * dt
        v = v + 0.5 * (a0 + a1) * dt
        r = r_next
    p_true = sp.eval(samples[-1].timestamp, 0)[:3]
    return float(np.linalg.norm(p - p_true))


class TestRightJacobian:
    def test_jr_matches_finite_difference_of_exp(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            phi = rng.normal(size=3)
            dphi = rng.normal(size=3)
            h = 1e-7
            r0 = Rotation.from_rotvec(phi).as_matrix()
            r1 = Rotation.from_rotvec(phi + h * dphi).as_matrix()
            omega_fd = Rotation.from_matrix(r0.T @ r1).as_rotvec() / h
            omega = so3_right_jacobian(phi) @ dphi
            assert np.abs(omega - omega_fd).max() < 1e-5

    def test_jr_dot_matches_finite_difference(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            phi = rng.normal(size=3)
            dphi = rng.normal(size=3)
            h = 1e-6
            jd = (so3_right_jacobian(phi + h * dphi) - so3_right_jacobian(phi - h * dphi)) / (2 * h)
            assert np.abs(so3_right_jacobian_dot(phi, dphi) - jd).max() < 1e-6

    def test_small_angle_limit(self):
        assert np.allclose(so3_right_jacobian(np.zeros(3)), np.eye(3))
        jd = so3_right_jacobian_dot(np.zeros(3), np.array([1.0, 0, 0]))
        expected = -0.5 * np.array([[0, 0, 0], [0, 0, -1.0], [0, 1.0, 0]])
        assert np.allclose(jd, expected, atol=1e-12)
