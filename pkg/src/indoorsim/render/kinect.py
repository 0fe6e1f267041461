"""Structured-light style depth degradation: disparity quantization at a 1/8
step, plus a quadratic axial noise model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class KinectNoiseParams:
    baseline: float = 0.075          # meters
    focal_px: float = 580.0          # disparity d = baseline * focal / z
    disparity_step: float = 1.0 / 8  # quantization step, pixels
    z_min: float = 0.4               # meters; outside [z_min, z_max] -> invalid 0
    z_max: float = 8.0
    sigma_base: float = 0.0012       # sigma_z(z) = sigma_base + sigma_quad*(z - z_min)^2
    sigma_quad: float = 0.0019


def apply_kinect_noise(depth: np.ndarray, seed: int = 0, params: KinectNoiseParams | None = None) -> np.ndarray:
    """Simulated sensor depth from ground-truth depth (meters, 0 = invalid)."""
    p = params or KinectNoiseParams()
    depth = np.asarray(depth, dtype=float)
    out = np.zeros_like(depth)
    valid = (depth >= p.z_min) & (depth <= p.z_max)
    if not valid.any():
        return out

    z = depth[valid]
    bf = p.baseline * p.focal_px
    disparity = bf / z
    disparity_q = np.round(disparity / p.disparity_step) * p.disparity_step
    zq = bf / disparity_q

    sigma = p.sigma_base + p.sigma_quad * (z - p.z_min) ** 2
    rng = np.random.default_rng(seed)
    noisy = zq + sigma * rng.standard_normal(zq.shape)

    noisy[(noisy < p.z_min) | (noisy > p.z_max)] = 0.0
    out[valid] = noisy
    return out
