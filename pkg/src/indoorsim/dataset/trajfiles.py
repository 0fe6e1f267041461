"""Trajectory interchange formats.

TUM:   `timestamp tx ty tz qx qy qz qw`, seconds/meters, '#' comments,
       space separated.
EuRoC: header line, then `timestamp_ns,px,py,pz,qw,qx,qy,qz`, comma separated.

Quaternions are written normalized and hemisphere-continuous (dot with the
previous quaternion >= 0). Floats use shortest round-trip formatting, and
imported poses keep their exact on-disk quaternion, so export -> import ->
export is byte-identical (quat<->rotvec trig is not bit-stable, the parsed
quaternion is).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from ..geometry import RigidTransform

EUROC_HEADER = "#timestamp [ns],p_x [m],p_y [m],p_z [m],q_w [],q_x [],q_y [],q_z []"
QUAT_NORM_TOL = 1e-2


class TrajectoryFormatError(ValueError):
    pass


@dataclass
class StampedPose:
    """Timestamped pose; keeps the exact quaternion read from / written to disk."""

    timestamp: float
    position: np.ndarray
    quat_xyzw: np.ndarray

    def __post_init__(self):
        self.position = np.asarray(self.position, float).reshape(3)
        self.quat_xyzw = np.asarray(self.quat_xyzw, float).reshape(4)

    @property
    def rotation(self) -> np.ndarray:
        """Rotation vector (axis * angle)."""
        return Rotation.from_quat(self.quat_xyzw).as_rotvec()

    @property
    def pose(self) -> RigidTransform:
        return RigidTransform(rotation=self.rotation, translation=self.position)


def _fmt(x: float) -> str:
    # shortest decimal that round-trips the double; "0" for zero, "1" for one
    return np.format_float_positional(float(x), trim="-")


def _as_stamped(stamped_poses) -> list[StampedPose]:
    out = []
    for item in stamped_poses:
        if isinstance(item, StampedPose):
            out.append(item)
            continue
        t, p = item
        if isinstance(p, RigidTransform):
            quat = Rotation.from_rotvec(p.rotation).as_quat()
            pos = p.translation
        else:
            arr = np.asarray(p, float).reshape(-1)
            pos = arr[:3]
            quat = Rotation.from_rotvec(arr[3:6]).as_quat()
        out.append(StampedPose(float(t), pos, quat))
    return out


def export_trajectory(stamped_poses, path: str | os.PathLike, format: str = "TUM") -> None:
    """Write poses in the requested format.

    Accepts StampedPose items or (timestamp, RigidTransform | 6-vector) pairs.
    """
    stamped = _as_stamped(stamped_poses)
    quats = np.array([s.quat_xyzw for s in stamped]).reshape(-1, 4)
    for i in range(1, len(quats)):  # hemisphere continuity
        if np.dot(quats[i], quats[i - 1]) < 0:
            quats[i] = -quats[i]

    fmt = format.upper()
    lines = []
    if fmt == "TUM":
        lines.append("# timestamp tx ty tz qx qy qz qw")
        for s, q in zip(stamped, quats):
            tx, ty, tz = s.position
            lines.append(
                f"{s.timestamp:.6f} {_fmt(tx)} {_fmt(ty)} {_fmt(tz)} "
                f"{_fmt(q[0])} {_fmt(q[1])} {_fmt(q[2])} {_fmt(q[3])}"
            )
    elif fmt == "EUROC":
        lines.append(EUROC_HEADER)
        for s, q in zip(stamped, quats):
            ns = round(s.timestamp * 1e9)
            tx, ty, tz = s.position
            lines.append(
                f"{ns},{_fmt(tx)},{_fmt(ty)},{_fmt(tz)},"
                f"{_fmt(q[3])},{_fmt(q[0])},{_fmt(q[1])},{_fmt(q[2])}"
            )
    else:
        raise TrajectoryFormatError(f"unsupported trajectory format {format!r} (TUM or EuRoC)")

    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def import_trajectory(path: str | os.PathLike, format: str = "TUM") -> list[StampedPose]:
    """Read a trajectory file; quaternions renormalized (tolerance 1e-2).

    Comment lines ('#') are skipped; malformed lines and non-monotone
    timestamps raise with the line number.
    """
    fmt = format.upper()
    if fmt not in ("TUM", "EUROC"):
        raise TrajectoryFormatError(f"unsupported trajectory format {format!r} (TUM or EuRoC)")
    out: list[StampedPose] = []
    prev_t = -np.inf
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",") if fmt == "EUROC" else line.split()
            if len(parts) != 8:
                raise TrajectoryFormatError(f"{path}:{lineno}: expected 8 fields, got {len(parts)}")
            try:
                vals = [float(x) for x in parts]
            except ValueError as exc:
                raise TrajectoryFormatError(f"{path}:{lineno}: malformed number: {line!r}") from exc
            if fmt == "TUM":
                t = vals[0]
                pos = np.array(vals[1:4])
                quat = np.array(vals[4:8])  # xyzw
            else:
                t = vals[0] * 1e-9
                pos = np.array(vals[1:4])
                qw, qx, qy, qz = vals[4:8]
                quat = np.array([qx, qy, qz, qw])
            norm = np.linalg.norm(quat)
            if abs(norm - 1.0) > QUAT_NORM_TOL:
                raise TrajectoryFormatError(
                    f"{path}:{lineno}: quaternion norm {norm:.4f} deviates more than {QUAT_NORM_TOL} from 1"
                )
            if t <= prev_t:
                raise TrajectoryFormatError(f"{path}:{lineno}: non-monotone timestamp {t}")
            prev_t = t
            if abs(norm - 1.0) > 1e-12:  # keep exact bits for already-unit quats
                quat = quat / norm
            out.append(StampedPose(t, pos, quat))
    return out
