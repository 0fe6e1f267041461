import numpy as np
import pytest

from indoorsim.dataset import import_trajectory
from indoorsim.trajectory import (
    JitterModel,
    TrajectoryParams,
    apply_jitter,
    default_jitter_model,
    fit_jitter_model,
    generate_trajectory,
    highpass_energy,
)


@pytest.fixture(scope="module")
def base_traj(toy_free):
    return generate_trajectory(toy_free, TrajectoryParams(traj_type=1, duration=8.0, seed=2))


class TestApplyJitter:
    def test_zero_noise_identity(self, base_traj, toy_free):
        model = default_jitter_model()
        model.noise_scale = np.zeros(6)
        model.step_amplitude = 0.0
        out = apply_jitter(base_traj, model, toy_free, seed=0)
        for ka, kb in zip(base_traj.frames, out.frames):
            assert np.array_equal(ka.shutter_open_pose.translation, kb.shutter_open_pose.translation)
            assert np.array_equal(ka.shutter_open_pose.rotation, kb.shutter_open_pose.rotation)

    def test_highfreq_energy_increases(self, base_traj, toy_free):
        out = apply_jitter(base_traj, default_jitter_model(), toy_free, seed=1)
        dt = 1.0 / base_traj.params.frame_rate
        e_base = highpass_energy(base_traj.positions(), dt, cutoff_hz=1.0)
        e_jit = highpass_energy(out.positions(), dt, cutoff_hz=1.0)
        assert e_jit > e_base

    def test_stays_in_free_space_many_seeds(self, base_traj, toy_free):
        model = default_jitter_model()
        for seed in range(100):
            out = apply_jitter(base_traj, model, toy_free, seed=seed)
            for k in out.frames:
                assert toy_free.is_free(k.shutter_open_pose.translation)

    def test_deviation_bounded(self, base_traj, toy_free):
        out = apply_jitter(base_traj, default_jitter_model(), toy_free, seed=3)
        base = base_traj.positions()
        jit = out.positions()
        assert np.linalg.norm(jit - base, axis=1).max() <= 0.3 + 1e-9

    def test_unstable_model_rejected(self, base_traj, toy_free):
        bad = JitterModel(ar_order=1, ar_coefficients=np.full((1, 6), 1.2),
                          noise_scale=np.full(6, 0.01))
        with pytest.raises(ValueError, match="unstable"):
            apply_jitter(base_traj, bad, toy_free, seed=0)

    def test_metadata_records_residual_speed(self, base_traj, toy_free):
        out = apply_jitter(base_traj, default_jitter_model(), toy_free, seed=4)
        speeds = out.metadata["jitter_residual_speed"]
        assert len(speeds) == len(out.frames)
        assert max(speeds) > 0

    def test_deterministic(self, base_traj, toy_free):
        a = apply_jitter(base_traj, default_jitter_model(), toy_free, seed=9)
        b = apply_jitter(base_traj, default_jitter_model(), toy_free, seed=9)
        for ka, kb in zip(a.frames, b.frames):
            assert np.array_equal(ka.shutter_open_pose.translation, kb.shutter_open_pose.translation)


class TestFitJitterModel:
    def test_recovers_synthetic_ar2(self):
        # synthesize AR(2) velocity residuals, integrate to poses, re-fit
        rng = np.random.default_rng(0)
        a1, a2 = 1.3, -0.55
        n = 10_000
        dt = 0.04
        v = np.zeros((n, 6))
        for k in range(2, n):
            v[k] = a1 * v[k - 1] + a2 * v[k - 2] + rng.standard_normal(6) * 0.01
        pos = np.cumsum(v[:, :3] * dt, axis=0)
        rot = np.cumsum(v[:, 3:] * dt, axis=0) * 0.1
        from indoorsim.geometry import RigidTransform

        seq = [
            (k * dt, RigidTransform(rotation=rot[k], translation=pos[k]))
            for k in range(n)
        ]
        model = fit_jitter_model([seq], ar_order=2)
        # the moving-average high-pass slightly biases the fit; 5% tolerance
        assert model.ar_coefficients[0, 0] == pytest.approx(a1, rel=0.05)
        assert model.ar_coefficients[1, 0] == pytest.approx(a2, rel=0.05)
        assert model.is_stable()

    def test_constant_velocity_near_zero(self):
        from indoorsim.geometry import RigidTransform

        dt = 0.04
        seq = [
            (k * dt, RigidTransform(translation=[0.5 * k * dt, 0.0, 0.0]))
            for k in range(500)
        ]
        model = fit_jitter_model([seq], ar_order=2)
        assert np.abs(model.noise_scale).max() < 1e-9
        assert model.step_amplitude == 0.0

    def test_walking_fixture_step_frequency(self, walking_fixture_path):
        stamped = import_trajectory(walking_fixture_path, format="TUM")
        seq = [(s.timestamp, s.pose) for s in stamped]
        model = fit_jitter_model([seq], ar_order=2)
        assert 1.0 <= model.step_frequency <= 3.0
        # gait bounce is a strong narrow peak: the amplitude should switch on
        assert model.step_amplitude > 0
        assert model.step_frequency == pytest.approx(1.8, abs=0.15)

    def test_insufficient_data_rejected(self):
        from indoorsim.geometry import RigidTransform

        seq = [(k * 0.04, RigidTransform()) for k in range(10)]
        with pytest.raises(ValueError, match="samples"):
            fit_jitter_model([seq], ar_order=2)


def test_default_model_is_stable():
    assert default_jitter_model().is_stable()
