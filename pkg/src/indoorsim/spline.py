"""Continuous-time pose representation: interpolating cubic B-spline over
position and rotation-vector channels, with analytic derivatives."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import BSpline, make_interp_spline

from .geometry import RigidTransform, unwrap_rotvecs


@dataclass
class PoseSpline:
    """Cubic B-spline through a 6-channel curve (position + rotation vector).

    Interpolates the control poses exactly (not-a-knot end conditions); the
    rotation-vector channel is unwrapped so neighbors stay within pi.
    """

    knots: np.ndarray              # full knot vector (len = n + degree + 1)
    control_points: np.ndarray     # (n, 6) spline coefficients
    degree: int = 3
    _derivs: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def t_min(self) -> float:
        return float(self.knots[self.degree])

    @property
    def t_max(self) -> float:
        return float(self.knots[len(self.knots) - self.degree - 1])

    def _bspline(self, order: int) -> BSpline:
        if order not in self._derivs:
            base = BSpline(self.knots, self.control_points, self.degree, extrapolate=False)
            self._derivs[order] = base if order == 0 else base.derivative(order)
        return self._derivs[order]

    def eval(self, t, order: int = 0) -> np.ndarray:
        """6-channel value (order 0) or time derivative (order 1 or 2) at t.

        Returns shape (6,) for scalar t, (N, 6) for array t. t must lie within
        the fitted span.
        """
        if order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t_arr < self.t_min - 1e-12) or np.any(t_arr > self.t_max + 1e-12):
            raise ValueError(
                f"t outside spline span [{self.t_min}, {self.t_max}]"
            )
        t_arr = np.clip(t_arr, self.t_min, self.t_max)
        out = self._bspline(order)(t_arr)
        return out[0] if np.isscalar(t) or np.ndim(t) == 0 else out

    def pose(self, t: float) -> RigidTransform:
        v = self.eval(t, 0)
        return RigidTransform(rotation=v[3:6], translation=v[0:3])


def fit_spline(timestamps, poses) -> PoseSpline:
    """Fit an interpolating cubic B-spline to timestamped control poses.

    timestamps: (n,) strictly increasing, uniformly spaced, n >= 4.
    poses: list of RigidTransform, or array (n, 6) of [position, rotation vector].
    """
    ts = np.asarray(timestamps, dtype=float).reshape(-1)
    if len(ts) < 4:
        raise ValueError(f"need >= 4 control poses, got {len(ts)}")
    dt = np.diff(ts)
    if np.any(dt <= 0):
        raise ValueError("timestamps must be strictly increasing")
    if np.max(np.abs(dt - dt[0])) > 1e-9 * max(1.0, abs(dt[0])):
        raise ValueError("timestamps must be uniformly spaced")

    if isinstance(poses[0], RigidTransform):
        channels = np.array([np.concatenate([p.translation, p.rotation]) for p in poses])
    else:
        channels = np.asarray(poses, dtype=float).reshape(len(ts), 6)
    channels = channels.copy()
    channels[:, 3:6] = unwrap_rotvecs(channels[:, 3:6])

    spl = make_interp_spline(ts, channels, k=3)  # default bc_type: not-a-knot
    return PoseSpline(knots=spl.t, control_points=spl.c, degree=3)
