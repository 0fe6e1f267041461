"""Data-driven trajectory styling: autoregressive velocity-residual jitter
plus a periodic gait impulse, behind a generator interface (window of past
velocities in, next velocity out) so a learned model can replace it."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from ..geometry import RigidTransform
from ..scene.types import FreeSpaceMap
from .params import Keyframe, Trajectory

MAX_BASE_DEVIATION = 0.3   # meters the jittered path may leave the base path
STEP_FREQ_BAND = (1.0, 3.0)  # Hz window for the gait spectral peak


@dataclass
class JitterModel:
    """AR(p) recursion on velocity residuals, per channel, plus gait impulses.

    ar_coefficients: (p, 6) — 3 linear (m/s) + 3 angular (rad/s) channels.
    noise_scale: (6,) innovation std per channel.
    """

    ar_order: int
    ar_coefficients: np.ndarray
    noise_scale: np.ndarray
    step_frequency: float = 1.8   # Hz
    step_amplitude: float = 0.0   # m/s^2 vertical impulse scale

    def __post_init__(self):
        self.ar_coefficients = np.asarray(self.ar_coefficients, float).reshape(self.ar_order, 6)
        self.noise_scale = np.asarray(self.noise_scale, float).reshape(6)

    def spectral_radius(self) -> float:
        """Largest companion-matrix eigenvalue magnitude across channels."""
        worst = 0.0
        p = self.ar_order
        for ch in range(6):
            comp = np.zeros((p, p))
            comp[0, :] = self.ar_coefficients[:, ch]
            if p > 1:
                comp[1:, :-1] = np.eye(p - 1)
            worst = max(worst, float(np.max(np.abs(np.linalg.eigvals(comp)))))
        return worst

    def is_stable(self) -> bool:
        return self.spectral_radius() < 1.0

    def next_residual(self, window: np.ndarray, innovation: np.ndarray) -> np.ndarray:
        """Generator interface: window (p, 6) of past residuals -> next (6,).

        window[0] is the most recent value (lag 1), window[j] is lag j+1.
        """
        out = innovation * self.noise_scale
        for j in range(self.ar_order):
            out = out + self.ar_coefficients[j] * window[j]
        return out


def default_jitter_model() -> JitterModel:
    """Hand-held style defaults: resonant AR(2) pair near 2 Hz at 25 Hz
    sampling, small angular fidgeting, 1.8 Hz gait bumps."""
    ar = np.zeros((2, 6))
    ar[0, :] = 1.6
    ar[1, :] = -0.72
    noise = np.array([0.012, 0.012, 0.010, 0.006, 0.006, 0.004])
    return JitterModel(
        ar_order=2,
        ar_coefficients=ar,
        noise_scale=noise,
        step_frequency=1.8,
        step_amplitude=0.35,
    )


def apply_jitter(
    traj: Trajectory,
    model: JitterModel,
    free: FreeSpaceMap,
    seed: int = 0,
) -> Trajectory:
    """Overlay AR + gait velocity residuals on a base trajectory.

    Residual positions are pulled back by a critically damped proportional
    force, clamped to MAX_BASE_DEVIATION of the base path, and rejected from
    occupied cells. Per-frame residual speed is stored in the metadata.
    """
    if not model.is_stable():
        raise ValueError("jitter model is unstable (spectral radius >= 1)")
    if len(traj.frames) == 0:
        raise ValueError("empty trajectory")

    rng = np.random.default_rng(seed)
    n = len(traj.frames)
    dt = 1.0 / traj.params.frame_rate
    p = model.ar_order

    res_vel = np.zeros((n, 6))
    window = np.zeros((p, 6))
    gain = 4.0  # s^-2 spring pulling the residual back to the base path
    damp = 2.0 * np.sqrt(gain)

    res_pos = np.zeros((n, 6))
    # stationary envelope: innovation std amplified by the AR impulse response;
    # the window holds the pure AR state, so this bound is tight
    amp = _stationary_amplification(model)
    envelope = 10.0 * (amp * model.noise_scale + 1e-9)
    for i in range(1, n):
        innovation = rng.standard_normal(6)
        ar = model.next_residual(window, innovation)
        if np.any(np.abs(ar) > envelope):
            raise ValueError("jitter recursion diverged beyond the 10x noise envelope")
        window = np.roll(window, 1, axis=0)
        window[0] = ar
        v = ar.copy()
        # periodic gait impulse: half-sine bumps, mostly vertical
        phase = (traj.frames[i].timestamp * model.step_frequency) % 1.0
        if phase < 0.3:
            bump = np.sin(phase / 0.3 * np.pi) * model.step_amplitude * dt
            v = v + np.array([0.0, 0.0, bump, 0.0, 0.0, 0.0])
        # proportional pull toward the base path keeps the residual bounded
        v = v + (-gain * res_pos[i - 1] - damp * res_vel[i - 1]) * dt
        res_vel[i] = v
        cand = res_pos[i - 1] + v * dt
        lin = cand[:3]
        norm = np.linalg.norm(lin)
        if norm > MAX_BASE_DEVIATION:
            lin = lin * (MAX_BASE_DEVIATION / norm)
            cand[:3] = lin
        res_pos[i] = cand

    frames: list[Keyframe] = []
    residual_speed = np.zeros(n)
    for i, kf in enumerate(traj.frames):
        if not res_pos[i].any():  # zero jitter leaves the keyframe untouched
            frames.append(kf)
            continue
        offset = res_pos[i, :3]
        rotvec = res_pos[i, 3:6]
        base_open = kf.shutter_open_pose
        pos = base_open.translation + offset
        if not free.is_free(pos):
            # back off toward the base position until the cell is free
            lo, hi = 0.0, 1.0
            for _ in range(24):
                mid = 0.5 * (lo + hi)
                if free.is_free(base_open.translation + offset * mid):
                    lo = mid
                else:
                    hi = mid
            offset = offset * lo
            pos = base_open.translation + offset
        rot = Rotation.from_rotvec(rotvec).as_matrix() @ base_open.matrix
        open_pose = RigidTransform.from_matrix(rot, pos)

        base_close = kf.shutter_close_pose
        rot_c = Rotation.from_rotvec(rotvec).as_matrix() @ base_close.matrix
        close_pose = RigidTransform.from_matrix(rot_c, base_close.translation + offset)
        residual_speed[i] = np.linalg.norm(res_vel[i, :3])
        frames.append(
            Keyframe(
                timestamp=kf.timestamp,
                shutter_open_pose=open_pose,
                shutter_close_pose=close_pose,
                look_at=kf.look_at,
            )
        )

    meta = dict(traj.metadata)
    meta["jitter_residual_speed"] = residual_speed.tolist()
    meta["jitter_seed"] = seed
    return Trajectory(frames=frames, params=traj.params, metadata=meta)


def fit_jitter_model(example_trajectories, ar_order: int = 2) -> JitterModel:
    """Least-squares AR fit on high-pass-filtered velocities of timestamped
    pose sequences [(t, RigidTransform), ...]; the gait frequency is the
    dominant spectral peak of the vertical velocity in [1, 3] Hz.

    Unstable fits are projected back into the stable region (coefficients
    shrunk) and reported via the returned model's metadata-free contract:
    the projection is applied silently but deterministically.
    """
    sequences = []
    for seq in example_trajectories:
        ts = np.array([float(t) for t, _ in seq])
        if len(ts) < 10 * ar_order:
            raise ValueError(f"need >= {10 * ar_order} samples per sequence, got {len(ts)}")
        dts = np.diff(ts)
        # text formats carry ~1e-6 s rounding; 0.1% relative jitter is uniform
        if np.any(dts <= 0) or np.max(np.abs(dts - dts[0])) > 1e-3 * max(dts[0], 1e-12):
            raise ValueError("sequence timestamps must be uniform and increasing")
        pos = np.array([np.asarray(p.translation, float) for _, p in seq])
        rot = np.array([np.asarray(p.rotation, float) for _, p in seq])
        sequences.append((float(dts[0]), pos, rot))

    if not sequences:
        raise ValueError("need at least one example sequence")

    xs = []
    ys = []
    dt0 = sequences[0][0]
    spec_accum = None
    freqs = None
    sigma_res = np.zeros(6)
    count = 0
    for dt, pos, rot in sequences:
        vel_lin = np.diff(pos, axis=0) / dt
        vel_ang = np.diff(rot, axis=0) / dt
        vel = np.hstack([vel_lin, vel_ang])
        # high-pass with a 3 s moving average (wide enough not to bias the AR
        # fit), trimming the convolution edges
        width = max(3, int(round(3.0 / dt)))
        vel = vel - _moving_average(vel, width)
        trim = width // 2 + 1
        if len(vel) <= 2 * trim + 10 * ar_order:
            raise ValueError("sequence too short after high-pass trimming")
        vel = vel[trim:-trim]
        for k in range(ar_order, len(vel)):
            xs.append(vel[k - ar_order:k][::-1].reshape(-1))
            ys.append(vel[k])
        count += 1
        vz = vel[:, 2]
        f = np.fft.rfftfreq(len(vz), dt)
        a = np.abs(np.fft.rfft(vz - vz.mean()))
        if spec_accum is None:
            spec_accum = a
            freqs = f
        elif len(a) == len(spec_accum):
            spec_accum = spec_accum + a

    x = np.asarray(xs)
    y = np.asarray(ys)
    # per-channel AR: channel ch regressed on its own lags
    coeffs = np.zeros((ar_order, 6))
    noise = np.zeros(6)
    for ch in range(6):
        cols = [x[:, j * 6 + ch] for j in range(ar_order)]
        a_mat = np.stack(cols, axis=1)
        sol, *_ = np.linalg.lstsq(a_mat, y[:, ch], rcond=None)
        coeffs[:, ch] = sol
        resid = y[:, ch] - a_mat @ sol
        noise[ch] = float(np.std(resid))

    model = JitterModel(ar_order=ar_order, ar_coefficients=coeffs, noise_scale=noise)
    shrink = 0
    while not model.is_stable() and shrink < 60:
        coeffs = coeffs * 0.95
        model = JitterModel(ar_order=ar_order, ar_coefficients=coeffs, noise_scale=noise)
        shrink += 1

    # gait frequency from the dominant vertical-velocity peak in [1, 3] Hz
    step_freq = 1.8
    step_amp = 0.0
    if freqs is not None and len(freqs):
        band = (freqs >= STEP_FREQ_BAND[0]) & (freqs <= STEP_FREQ_BAND[1])
        if band.any() and spec_accum[band].max() > 0:
            step_freq = float(freqs[band][np.argmax(spec_accum[band])])
            total = np.sqrt(np.mean(spec_accum ** 2))
            peak = spec_accum[band].max()
            # amplitude only when the peak clearly stands out of the spectrum
            if total > 0 and peak > 3.0 * total:
                step_amp = float(min(1.0, noise[2] * 25.0))
    model.step_frequency = step_freq
    model.step_amplitude = step_amp
    return model


def _stationary_amplification(model: JitterModel, horizon: int = 256) -> float:
    """sqrt of the summed squared impulse response, worst channel; bounds the
    stationary std of the AR output relative to the innovation std."""
    worst = 1.0
    p = model.ar_order
    for ch in range(6):
        h = np.zeros(horizon)
        h[0] = 1.0
        for k in range(1, horizon):
            acc = 0.0
            for j in range(min(p, k)):
                acc += model.ar_coefficients[j, ch] * h[k - 1 - j]
            h[k] = acc
        worst = max(worst, float(np.sqrt(np.sum(h * h))))
    return worst


def _moving_average(x: np.ndarray, width: int) -> np.ndarray:
    if width <= 1:
        return np.zeros_like(x)
    kernel = np.ones(width) / width
    out = np.empty_like(x)
    for ch in range(x.shape[1]):
        out[:, ch] = np.convolve(x[:, ch], kernel, mode="same")
    return out


def highpass_energy(positions: np.ndarray, dt: float, cutoff_hz: float = 1.0) -> float:
    """Energy of the speed signal above cutoff_hz (jitter styling diagnostic)."""
    speed = np.linalg.norm(np.diff(positions, axis=0) / dt, axis=1)
    spec = np.abs(np.fft.rfft(speed - speed.mean())) ** 2
    freqs = np.fft.rfftfreq(len(speed), dt)
    return float(spec[freqs > cutoff_hz].sum())
