"""Rigid-transform and rotation helpers shared by all modules.

Conventions: poses are world-from-camera (or world-from-body). Rotations are
stored as rotation vectors (axis * angle, radians) or 3x3 matrices; quaternions
are (x, y, z, w) unless a file format dictates otherwise. World frame is Z-up,
gravity along -Z.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation, Slerp


@dataclass
class RigidTransform:
    """World-from-local rotation + translation, lengths in meters."""

    rotation: np.ndarray = field(default_factory=lambda: np.zeros(3))  # rotation vector
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        # copy: poses are value types, callers may mutate their arrays after
        self.rotation = np.array(self.rotation, dtype=float).reshape(3)
        self.translation = np.array(self.translation, dtype=float).reshape(3)

    @property
    def matrix(self) -> np.ndarray:
        """3x3 rotation matrix."""
        return Rotation.from_rotvec(self.rotation).as_matrix()

    @classmethod
    def from_matrix(cls, rot: np.ndarray, trans) -> "RigidTransform":
        return cls(Rotation.from_matrix(rot).as_rotvec(), np.asarray(trans, float))

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls()

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform points (..., 3) from local to world."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.matrix.T + self.translation

    def inverse(self) -> "RigidTransform":
        rot = self.matrix.T
        return RigidTransform.from_matrix(rot, -rot @ self.translation)

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self o other: apply other first, then self."""
        r = self.matrix
        return RigidTransform.from_matrix(r @ other.matrix, r @ other.translation + self.translation)

    def almost_equal(self, other: "RigidTransform", tol: float = 1e-9) -> bool:
        dr = Rotation.from_matrix(self.matrix.T @ other.matrix).magnitude()
        return bool(dr <= tol and np.all(np.abs(self.translation - other.translation) <= tol))


def rotvec_to_matrix(rotvec) -> np.ndarray:
    return Rotation.from_rotvec(np.asarray(rotvec, float)).as_matrix()


def matrix_to_rotvec(mat) -> np.ndarray:
    return Rotation.from_matrix(np.asarray(mat, float)).as_rotvec()


def rotvec_to_quat_xyzw(rotvec) -> np.ndarray:
    return Rotation.from_rotvec(np.asarray(rotvec, float)).as_quat()


def quat_xyzw_to_rotvec(quat) -> np.ndarray:
    return Rotation.from_quat(np.asarray(quat, float)).as_rotvec()


def interpolate_pose(a: RigidTransform, b: RigidTransform, frac: float) -> RigidTransform:
    """Linear in translation, spherical in rotation (frac in [0, 1])."""
    if frac <= 0.0:
        return RigidTransform(a.rotation.copy(), a.translation.copy())
    if frac >= 1.0:
        return RigidTransform(b.rotation.copy(), b.translation.copy())
    rots = Rotation.from_rotvec(np.stack([a.rotation, b.rotation]))
    rot = Slerp([0.0, 1.0], rots)(frac)
    trans = (1.0 - frac) * a.translation + frac * b.translation
    return RigidTransform(rot.as_rotvec(), trans)


def look_at_pose(position, target, up) -> RigidTransform:
    """Camera pose looking from position toward target.

    Camera frame: +z forward (optical axis), +x right, +y down, matching the
    pinhole pixel convention (image y grows downward).
    """
    position = np.asarray(position, float)
    forward = np.asarray(target, float) - position
    n = np.linalg.norm(forward)
    if n < 1e-12:
        raise ValueError("look_at target coincides with position")
    forward = forward / n
    up = np.asarray(up, float)
    right = np.cross(forward, up)
    rn = np.linalg.norm(right)
    if rn < 1e-9:  # forward parallel to up: pick any perpendicular right axis
        alt = np.array([1.0, 0.0, 0.0]) if abs(forward[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        right = np.cross(forward, alt)
        rn = np.linalg.norm(right)
    right = right / rn
    down = np.cross(forward, right)
    rot = np.stack([right, down, forward], axis=1)
    return RigidTransform.from_matrix(rot, position)


def so3_right_jacobian(rotvec: np.ndarray) -> np.ndarray:
    """Right Jacobian J_r of SO(3): body angular velocity = J_r(phi) @ phi_dot."""
    phi = np.asarray(rotvec, float)
    theta = np.linalg.norm(phi)
    k = _skew(phi)
    if theta < 1e-5:
        t2 = theta * theta
        c1 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
        c2 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
    else:
        c1 = (1.0 - np.cos(theta)) / (theta * theta)
        c2 = (theta - np.sin(theta)) / (theta ** 3)
    return np.eye(3) - c1 * k + c2 * (k @ k)


def so3_right_jacobian_dot(rotvec: np.ndarray, rotvec_dot: np.ndarray) -> np.ndarray:
    """Time derivative of J_r along phi(t) with rate phi_dot."""
    phi = np.asarray(rotvec, float)
    dphi = np.asarray(rotvec_dot, float)
    theta = np.linalg.norm(phi)
    k = _skew(phi)
    dk = _skew(dphi)
    phidot = float(phi @ dphi)  # = theta * theta_dot, finite at theta = 0
    if theta < 1e-5:
        t2 = theta * theta
        c1 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
        c2 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
        # c1'(theta)/theta and c2'(theta)/theta stay finite; multiply by theta*theta_dot
        dc1 = (-1.0 / 12.0 + t2 / 180.0) * phidot
        dc2 = (-1.0 / 60.0 + t2 / 1260.0) * phidot
    else:
        c1 = (1.0 - np.cos(theta)) / (theta * theta)
        c2 = (theta - np.sin(theta)) / (theta ** 3)
        theta_dot = phidot / theta
        dc1 = (np.sin(theta) / (theta * theta) - 2.0 * (1.0 - np.cos(theta)) / theta ** 3) * theta_dot
        dc2 = ((1.0 - np.cos(theta)) / theta ** 3 - 3.0 * (theta - np.sin(theta)) / theta ** 4) * theta_dot
    return -dc1 * k - c1 * dk + dc2 * (k @ k) + c2 * (dk @ k + k @ dk)


def _skew(v: np.ndarray) -> np.ndarray:
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def unwrap_rotvecs(rotvecs: np.ndarray) -> np.ndarray:
    """Pick equivalent rotation-vector representatives so neighbors are close.

    Each rotation has representatives axis*(theta + 2*pi*k); chooses per-sample
    the representative nearest the previous one. Raises if a neighbor jump of
    >= pi remains after unwrapping (genuinely ambiguous input).
    """
    rv = np.asarray(rotvecs, dtype=float).copy()
    for i in range(1, len(rv)):
        prev = rv[i - 1]
        cur = rv[i]
        theta = np.linalg.norm(cur)
        if theta < 1e-12:
            axis = prev / np.linalg.norm(prev) if np.linalg.norm(prev) > 1e-12 else np.array([1.0, 0.0, 0.0])
        else:
            axis = cur / theta
        best = cur
        best_d = np.linalg.norm(cur - prev)
        for k in range(-3, 4):
            cand = axis * (theta + 2.0 * np.pi * k)
            d = np.linalg.norm(cand - prev)
            if d < best_d:
                best, best_d = cand, d
        rv[i] = best
        if best_d >= np.pi:
            raise ValueError(
                f"rotation-vector jump of {best_d:.3f} rad >= pi between samples {i-1} and {i}; "
                "input rotations are too far apart to unwrap"
            )
    return rv
