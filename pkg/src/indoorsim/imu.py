"""IMU synthesis from a continuous-time pose spline.

Accelerometer convention: specific force f = R_WB^T (p_ddot - g) with
g = (0, 0, -9.81); a static, level sensor reads +9.81 on its up axis.
Gyroscope: body angular velocity from the rotation-vector rate through the
SO(3) right Jacobian, omega = J_r(phi) phi_dot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    RigidTransform,
    rotvec_to_matrix,
    so3_right_jacobian,
    so3_right_jacobian_dot,
)
from .spline import PoseSpline

GRAVITY = np.array([0.0, 0.0, -9.81])  # m/s^2, world frame


@dataclass
class ImuNoise:
    gyro_noise_density: float = 0.0    # rad/s/sqrt(Hz)
    accel_noise_density: float = 0.0   # m/s^2/sqrt(Hz)
    gyro_bias_walk: float = 0.0        # rad/s^2/sqrt(Hz)
    accel_bias_walk: float = 0.0       # m/s^3/sqrt(Hz)
    seed: int = 0

    def __post_init__(self):
        for name in ("gyro_noise_density", "accel_noise_density", "gyro_bias_walk", "accel_bias_walk"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass
class ImuConfig:
    rate: float = 800.0                # Hz
    gravity_world: np.ndarray = field(default_factory=lambda: GRAVITY.copy())
    imu_from_camera: RigidTransform = field(default_factory=RigidTransform.identity)
    noise: ImuNoise | None = None

    def __post_init__(self):
        self.gravity_world = np.asarray(self.gravity_world, float).reshape(3)
        if self.rate <= 0:
            raise ValueError("rate must be positive")


@dataclass
class ImuSample:
    timestamp: float                   # seconds
    gyro: np.ndarray                   # rad/s, body frame
    accel: np.ndarray                  # m/s^2, body frame specific force


def synthesize_imu(spline: PoseSpline, config: ImuConfig) -> list[ImuSample]:
    """Ground-truth (or noisy) IMU samples at exact 1/rate spacing.

    The spline carries world-from-camera poses; samples are expressed in the
    IMU body frame B with x_B = imu_from_camera * x_C. Sample k sits at
    t_min + k/rate for k = 0 .. floor(span * rate).
    """
    rate = float(config.rate)
    span = spline.t_max - spline.t_min
    n = int(np.floor(span * rate + 1e-9)) + 1
    if n < 2:
        raise ValueError("spline span too short for the requested rate")
    k = np.arange(n)
    ts = spline.t_min + k / rate

    val = spline.eval(ts, 0)
    d1 = spline.eval(ts, 1)
    d2 = spline.eval(ts, 2)

    t_cb = config.imu_from_camera.inverse()  # camera-from-imu
    r_cb = t_cb.matrix
    p_cb = t_cb.translation
    identity_extrinsic = (
        np.allclose(r_cb, np.eye(3), atol=1e-15) and np.allclose(p_cb, 0.0, atol=1e-15)
    )
    g = config.gravity_world

    samples: list[ImuSample] = []
    for i in range(n):
        phi = val[i, 3:6]
        dphi = d1[i, 3:6]
        r_wc = rotvec_to_matrix(phi)
        omega_c = so3_right_jacobian(phi) @ dphi  # camera-frame angular velocity
        if identity_extrinsic:
            r_wb = r_wc
            acc_w = d2[i, 0:3]
            omega_b = omega_c
        else:
            r_wb = r_wc @ r_cb
            omega_b = r_cb.T @ omega_c
            # p_WB = p_WC + R_WC p_CB; differentiate twice with
            # R_ddot = R ([w]x^2 + [wdot]x)
            omega_dot_c = (
                so3_right_jacobian_dot(phi, dphi) @ dphi + so3_right_jacobian(phi) @ d2[i, 3:6]
            )
            wx = _skew(omega_c)
            acc_w = d2[i, 0:3] + r_wc @ ((wx @ wx + _skew(omega_dot_c)) @ p_cb)
        accel = r_wb.T @ (acc_w - g)
        samples.append(ImuSample(timestamp=float(ts[i]), gyro=omega_b, accel=accel))

    if config.noise is not None:
        samples = add_imu_noise(samples, config.noise)
    return samples


def add_imu_noise(samples: list[ImuSample], noise: ImuNoise) -> list[ImuSample]:
    """Additive white noise (density/sqrt(dt)) plus integrated bias random walk."""
    if len(samples) < 2:
        return [ImuSample(s.timestamp, s.gyro.copy(), s.accel.copy()) for s in samples]
    dts = np.diff([s.timestamp for s in samples])
    dt = float(dts[0])
    if np.max(np.abs(dts - dt)) > 1e-9:
        raise ValueError("samples must be uniformly spaced")

    rng = np.random.default_rng(noise.seed)
    n = len(samples)
    sqdt = np.sqrt(dt)
    gyro_white = noise.gyro_noise_density / sqdt * rng.standard_normal((n, 3))
    accel_white = noise.accel_noise_density / sqdt * rng.standard_normal((n, 3))
    gyro_bias = np.cumsum(noise.gyro_bias_walk * sqdt * rng.standard_normal((n, 3)), axis=0)
    accel_bias = np.cumsum(noise.accel_bias_walk * sqdt * rng.standard_normal((n, 3)), axis=0)

    out = []
    for i, s in enumerate(samples):
        out.append(
            ImuSample(
                timestamp=s.timestamp,
                gyro=s.gyro + gyro_white[i] + gyro_bias[i],
                accel=s.accel + accel_white[i] + accel_bias[i],
            )
        )
    return out


def _skew(v):
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])
